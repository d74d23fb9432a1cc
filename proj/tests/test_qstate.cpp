#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nmrqec/qstate.hpp"
#include "test_helpers.hpp"

using namespace nmrqec;
using namespace nmrqec::testing;
using enum SpinAxis;

TEST_CASE("single Iz term realizes as half-signed diagonal") {
  ProductOperatorSum s;
  s.terms = {term(Z, Identity, Identity, 1.0)};
  DensityMatrix dm = po_to_matrix(s, Convention::Deviation);
  Matrix8 expected = Matrix8::Zero();
  for (int b = 0; b < kDim; ++b) expected(b, b) = (b & 4) ? -0.5 : 0.5;
  CHECK(max_abs_diff(dm.mat, expected) < 1e-15);
}

TEST_CASE("pseudopure z expansion equals the projector difference") {
  // Iz (x) (1/2+Iz) (x) (1/2+Iz) written out term by term must equal
  // (|000><000| - |100><100|) / 2.
  DensityMatrix dm =
      po_to_matrix(pseudopure_z_terms(), Convention::Deviation);
  Matrix8 expected = Matrix8::Zero();
  expected(0, 0) = 0.5;
  expected(4, 4) = -0.5;
  CHECK(max_abs_diff(dm.mat, expected) < 1e-15);
  CHECK(dm.trace_error() < 1e-15);
}

TEST_CASE("empty sum yields the additive identity of each convention") {
  ProductOperatorSum empty;
  CHECK(po_to_matrix(empty, Convention::Deviation).mat.cwiseAbs().maxCoeff() ==
        0.0);
  Matrix8 unit_eighth = Matrix8::Identity() / 8.0;
  CHECK(max_abs_diff(po_to_matrix(empty, Convention::FullTrace).mat,
                     unit_eighth) < 1e-15);
}

TEST_CASE("matrix_to_po projects a bare Ix1 onto a single term") {
  ProductOperatorSum s;
  s.terms = {term(X, Identity, Identity, 1.0)};
  DensityMatrix dm = po_to_matrix(s, Convention::Deviation);
  ProductOperatorSum back = matrix_to_po(dm);
  REQUIRE(back.terms.size() == 1);
  CHECK(back.terms[0].axes == std::array<SpinAxis, 3>{X, Identity, Identity});
  CHECK(back.terms[0].coefficient == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("encoded pseudopure state decomposes as the x-operator sum") {
  // 1/4 (Ix1 + Ix2 + Ix3 + 4 Ix Ix Ix) recovered coefficient by coefficient.
  ProductOperatorSum s;
  s.terms = {term(X, Identity, Identity, 0.25), term(Identity, X, Identity, 0.25),
             term(Identity, Identity, X, 0.25), term(X, X, X, 1.0)};
  DensityMatrix dm = po_to_matrix(s, Convention::Deviation);
  ProductOperatorSum back = matrix_to_po(dm);
  CHECK(back.terms.size() == 4);
  CHECK(back.coefficient(X, Identity, Identity) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(back.coefficient(Identity, X, Identity) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(back.coefficient(Identity, Identity, X) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(back.coefficient(X, X, X) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matrix -> po -> matrix is the identity on random Hermitians") {
  std::mt19937_64 rng(7101);
  for (int i = 0; i < 100; ++i) {
    Matrix8 m = random_hermitian(rng);
    ProductOperatorSum s = matrix_to_po({m, Convention::FullTrace});
    Matrix8 rebuilt = po_to_matrix(s, Convention::FullTrace).mat;
    // FullTrace honors the explicit identity term captured by the
    // projection, so arbitrary-trace matrices survive.
    if (s.coefficient(Identity, Identity, Identity) == 0.0)
      rebuilt -= Matrix8::Identity() / 8.0;
    CHECK(max_abs_diff(rebuilt, m) < 1e-12);
  }
}

TEST_CASE("po -> matrix -> po reproduces canonical coefficients") {
  std::mt19937_64 rng(7102);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> axis(0, 3);
  std::uniform_int_distribution<int> count(1, 12);
  for (int i = 0; i < 100; ++i) {
    ProductOperatorSum s;
    int n = count(rng);
    for (int j = 0; j < n; ++j)
      s.terms.push_back({{static_cast<SpinAxis>(axis(rng)),
                          static_cast<SpinAxis>(axis(rng)),
                          static_cast<SpinAxis>(axis(rng))},
                         u(rng)});
    ProductOperatorSum canon = s.canonical();
    ProductOperatorSum back =
        matrix_to_po(po_to_matrix(canon, Convention::FullTrace));
    ProductOperatorSum diff = canon + (-1.0 * back);
    for (const auto& t : diff.canonical(0.0).terms)
      CHECK(std::abs(t.coefficient) < 1e-12);
  }
}

TEST_CASE("the 64 product-operator basis elements are pairwise orthogonal") {
  std::vector<Matrix8> basis;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        basis.push_back(term_matrix({{static_cast<SpinAxis>(a),
                                      static_cast<SpinAxis>(b),
                                      static_cast<SpinAxis>(c)},
                                     1.0}));
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Complex overlap = (basis[i].adjoint() * basis[j]).trace();
      if (i == j)
        CHECK(overlap.real() > 0.0);
      else
        CHECK(std::abs(overlap) < 1e-14);
    }
}

TEST_CASE("coherence order counts signed bit flips") {
  CHECK(coherence_order(0b000, 0b111) == 3);
  CHECK(coherence_order(0b111, 0b000) == -3);
  CHECK(coherence_order(0b001, 0b110) == 1);
  CHECK(coherence_order(0b101, 0b101) == 0);
  CHECK(coherence_order(0b100, 0b010) == 0);
}

TEST_CASE("diagonal operators are pure zero-quantum") {
  ProductOperatorSum s;
  s.terms = {term(Z, Z, Z, 1.0)};
  auto comps =
      coherence_decompose(po_to_matrix(s, Convention::Deviation));
  for (const auto& c : comps) {
    double norm = c.component.mat.cwiseAbs().maxCoeff();
    if (c.order == 0)
      CHECK(norm > 0.0);
    else
      CHECK(norm == 0.0);
  }
}

TEST_CASE("4 IxIxIx splits into the single- and triple-quantum groups") {
  ProductOperatorSum s;
  s.terms = {term(X, X, X, 4.0)};
  DensityMatrix dm = po_to_matrix(s, Convention::Deviation);
  auto comps = coherence_decompose(dm);

  // Nonzero only at n = +-1 and +-3.
  for (const auto& c : comps) {
    double norm = c.component.mat.cwiseAbs().maxCoeff();
    if (std::abs(c.order) == 1 || std::abs(c.order) == 3)
      CHECK(norm > 0.0);
    else
      CHECK(norm == 0.0);
  }

  // The grouping identity: 4 IxIxIx = (3 IxIxIx + IxIyIy + IyIxIy + IyIyIx)
  // + (IxIxIx - IxIyIy - IyIxIy - IyIyIx), first group single quantum,
  // second group triple quantum.
  ProductOperatorSum single_group;
  single_group.terms = {term(X, X, X, 3.0), term(X, Y, Y, 1.0),
                        term(Y, X, Y, 1.0), term(Y, Y, X, 1.0)};
  ProductOperatorSum triple_group;
  triple_group.terms = {term(X, X, X, 1.0), term(X, Y, Y, -1.0),
                        term(Y, X, Y, -1.0), term(Y, Y, X, -1.0)};
  Matrix8 single_part = comps[1 + 3].component.mat + comps[-1 + 3].component.mat;
  Matrix8 triple_part = comps[3 + 3].component.mat + comps[-3 + 3].component.mat;
  CHECK(max_abs_diff(single_part,
                     po_to_matrix(single_group, Convention::Deviation).mat) <
        1e-14);
  CHECK(max_abs_diff(triple_part,
                     po_to_matrix(triple_group, Convention::Deviation).mat) <
        1e-14);
}

TEST_CASE("unit matrix is zero-quantum only") {
  DensityMatrix unit{Matrix8::Identity() / 8.0, Convention::FullTrace};
  auto comps = coherence_decompose(unit);
  for (const auto& c : comps) {
    if (c.order != 0) CHECK(c.component.mat.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("coherence components sum back to the input exactly") {
  std::mt19937_64 rng(7103);
  for (int i = 0; i < 100; ++i) {
    Matrix8 m = random_complex_matrix(rng);
    auto comps = coherence_decompose({m, Convention::Deviation});
    Matrix8 sum = Matrix8::Zero();
    for (const auto& c : comps) sum += c.component.mat;
    CHECK(max_abs_diff(sum, m) < 1e-14);
  }
}

TEST_CASE("partial trace keeps the full spin-1 coefficient of Eq.-style input") {
  DensityMatrix dm =
      po_to_matrix(pseudopure_z_terms(), Convention::Deviation);
  ReducedState r = partial_trace_to_spin1(dm);
  Matrix2 iz = single_spin_op(Z);
  CHECK((r.mat - iz).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace of a maximally mixed state stays maximally mixed") {
  DensityMatrix dm{Matrix8::Identity() / 8.0, Convention::FullTrace};
  ReducedState r = partial_trace_to_spin1(dm);
  CHECK((r.mat - 0.5 * Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(r.convention == Convention::FullTrace);
}

TEST_CASE("partial trace of A (x) B is A times trace(B)") {
  std::mt19937_64 rng(7104);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Matrix2 a;
    Eigen::Matrix4cd b;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) a(r, c) = Complex(u(rng), u(rng));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) b(r, c) = Complex(u(rng), u(rng));
    Matrix8 full = Eigen::kroneckerProduct(a, b).eval();
    ReducedState reduced = partial_trace_to_spin1({full, Convention::Deviation});
    Matrix2 expected = a * b.trace();
    CHECK((reduced.mat - expected).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("pseudopure_input reproduces the four-term z expansion") {
  DensityMatrix dm = pseudopure_input(single_spin_op(Z));
  CHECK(dm.convention == Convention::Deviation);
  CHECK(max_abs_diff(dm.mat,
                     po_to_matrix(pseudopure_z_terms(),
                                  Convention::Deviation)
                         .mat) < 1e-15);
}

TEST_CASE("pseudopure_input around the unit input is a full-trace state") {
  DensityMatrix dm = pseudopure_input(0.5 * Matrix2::Identity());
  CHECK(dm.convention == Convention::FullTrace);
  CHECK(dm.trace_error() < 1e-15);
  CHECK(dm.min_eigenvalue() > -kPositivityTol);
}

TEST_CASE("pseudopure_input around Ix carries X on spin 1 in every term") {
  DensityMatrix dm = pseudopure_input(single_spin_op(X));
  ProductOperatorSum s = matrix_to_po(dm);
  REQUIRE(s.terms.size() == 4);
  for (const auto& t : s.terms) CHECK(t.axes[0] == X);
  CHECK(s.coefficient(X, Identity, Identity) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.coefficient(X, Z, Identity) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.coefficient(X, Identity, Z) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.coefficient(X, Z, Z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pseudopure_input rejects non-Hermitian spin states") {
  Matrix2 bad;
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(pseudopure_input(bad), std::invalid_argument);
}

TEST_CASE("density matrix validity checks") {
  DensityMatrix good{Matrix8::Identity() / 8.0, Convention::FullTrace};
  CHECK(good.is_valid());

  DensityMatrix negative{-Matrix8::Identity() / 8.0, Convention::FullTrace};
  CHECK_FALSE(negative.is_valid());

  std::mt19937_64 rng(7105);
  DensityMatrix dev = random_deviation_state(rng);
  CHECK(dev.trace_error() < 1e-13);
  CHECK(dev.hermiticity_error() < 1e-15);
}

TEST_CASE("matrix dump round-trips") {
  std::mt19937_64 rng(7106);
  Matrix8 m = random_complex_matrix(rng);
  Matrix8 back = parse_matrix_dump(dump_matrix(m));
  CHECK(max_abs_diff(m, back) == 0.0);
  CHECK_THROWS_AS(parse_matrix_dump("1,2 3,4"), std::invalid_argument);
}
