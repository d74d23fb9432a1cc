#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nmrqec/channels.hpp"
#include "nmrqec/circuits.hpp"
#include "test_helpers.hpp"

using namespace nmrqec;
using namespace nmrqec::testing;
using enum SpinAxis;

TEST_CASE("gradient diffusion rate follows the squared phase gradient") {
  GradientDiffusionParams p;
  p.gamma = 2.675e8;
  p.gradient = 0.1;
  p.delta = 1e-3;
  p.diffusion = 1e-9;
  p.order = 1;

  // Independent evaluation by direct multiplication.
  double dphi = 2.675e8 * 0.1 * 1e-3 * 1.0;
  double expected = dphi * dphi * 1e-9;
  CHECK(gradient_diffusion_rate(p) == doctest::Approx(expected).epsilon(1e-14));

  // Zero-quantum terms are immune.
  p.order = 0;
  CHECK(gradient_diffusion_rate(p) == 0.0);

  // n enters squared: 1 -> 3 multiplies the rate by 9.
  p.order = 3;
  CHECK(gradient_diffusion_rate(p) ==
        doctest::Approx(9.0 * expected).epsilon(1e-12));

  p.order = 1;
  p.delta = -1.0;
  CHECK_THROWS_AS(gradient_diffusion_rate(p), std::invalid_argument);
  p.delta = 1e-3;
  p.diffusion = -1.0;
  CHECK_THROWS_AS(gradient_diffusion_rate(p), std::invalid_argument);
}

TEST_CASE("model constructors reject non-positive time constants") {
  CHECK_THROWS_AS(DephasingModel::correlated(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DephasingModel::independent(1.0, -2.0, 1.0),
                  std::invalid_argument);
  CHECK(DephasingModel::independent(1.1, 0.6, 3.0).reference_time() ==
        doctest::Approx(0.6));
}

TEST_CASE("zero duration is the identity map") {
  std::mt19937_64 rng(9101);
  DensityMatrix dm = random_density_matrix(rng);
  DensityMatrix out = apply_dephasing(dm, DephasingModel::correlated(0.7), 0.0);
  CHECK(max_abs_diff(out.mat, dm.mat) == 0.0);
  CHECK_THROWS_AS(apply_dephasing(dm, DephasingModel::correlated(1.0), -1.0),
                  std::invalid_argument);
}

TEST_CASE("correlated decay of the encoded state matches the grouped law") {
  // Encoded x-operator sum evolves with the single-quantum group damped by
  // exp(-t/tau) and the triple-quantum group damped by exp(-9t/tau).
  double tau = 0.8, t = 0.37;
  ProductOperatorSum rho_b;
  rho_b.terms = {term(X, Identity, Identity, 0.25),
                 term(Identity, X, Identity, 0.25),
                 term(Identity, Identity, X, 0.25), term(X, X, X, 1.0)};
  DensityMatrix in = po_to_matrix(rho_b, Convention::Deviation);
  DensityMatrix out =
      apply_dephasing(in, DephasingModel::correlated(tau), t);

  double e1 = std::exp(-t / tau);
  double e9 = std::exp(-9.0 * t / tau);
  ProductOperatorSum expected;
  expected.terms = {term(X, Identity, Identity, 0.25 * e1),
                    term(Identity, X, Identity, 0.25 * e1),
                    term(Identity, Identity, X, 0.25 * e1),
                    // 1/4 of (3 XXX + XYY + YXY + YYX) e^{-t/tau}
                    term(X, X, X, 0.75 * e1), term(X, Y, Y, 0.25 * e1),
                    term(Y, X, Y, 0.25 * e1), term(Y, Y, X, 0.25 * e1),
                    // 1/4 of (XXX - XYY - YXY - YYX) e^{-9t/tau}
                    term(X, X, X, 0.25 * e9), term(X, Y, Y, -0.25 * e9),
                    term(Y, X, Y, -0.25 * e9), term(Y, Y, X, -0.25 * e9)};
  CHECK(max_abs_diff(out.mat,
                     po_to_matrix(expected, Convention::Deviation).mat) <
        1e-14);
}

TEST_CASE("independent decay damps a single x coherence at its own T2") {
  ProductOperatorSum s;
  s.terms = {term(X, Identity, Identity, 1.0)};
  DensityMatrix in = po_to_matrix(s, Convention::Deviation);
  auto model = DephasingModel::independent(1.1, 0.6, 3.0);
  double t = 0.6;
  DensityMatrix out = apply_dephasing(in, model, t);
  CHECK(max_abs_diff(out.mat, std::exp(-t / 1.1) * in.mat) < 1e-14);
}

TEST_CASE("dephasing preserves trace, Hermiticity and positivity") {
  std::mt19937_64 rng(9102);
  for (const auto& model :
       {DephasingModel::correlated(0.5),
        DephasingModel::independent(1.1, 0.6, 3.0)}) {
    for (int i = 0; i < 100; ++i) {
      DensityMatrix dm = random_density_matrix(rng);
      DensityMatrix out = apply_dephasing(dm, model, 0.4);
      CHECK(std::abs(out.mat.trace() - dm.mat.trace()) < 1e-14);
      CHECK(out.hermiticity_error() < 1e-14);
      CHECK(out.min_eigenvalue() > -kPositivityTol);
    }
  }
}

TEST_CASE("dephasing is unital") {
  DensityMatrix unit{Matrix8::Identity() / 8.0, Convention::FullTrace};
  for (const auto& model :
       {DephasingModel::correlated(0.2),
        DephasingModel::independent(0.3, 0.9, 2.0)}) {
    DensityMatrix out = apply_dephasing(unit, model, 1.3);
    CHECK(max_abs_diff(out.mat, unit.mat) == 0.0);
  }
}

TEST_CASE("dephasing composes as a semigroup") {
  std::mt19937_64 rng(9103);
  for (const auto& model :
       {DephasingModel::correlated(0.5),
        DephasingModel::independent(1.1, 0.6, 3.0)}) {
    for (int i = 0; i < 100; ++i) {
      DensityMatrix dm = random_density_matrix(rng);
      double t1 = 0.21, t2 = 0.58;
      DensityMatrix two_step =
          apply_dephasing(apply_dephasing(dm, model, t1), model, t2);
      DensityMatrix one_step = apply_dephasing(dm, model, t1 + t2);
      CHECK(max_abs_diff(two_step.mat, one_step.mat) < 1e-12);
    }
  }
}

TEST_CASE("correlated decay factor depends only on the squared order") {
  auto model = DephasingModel::correlated(0.9);
  double t = 0.44;
  std::map<int, double> factor_by_n2;
  for (int r = 0; r < kDim; ++r)
    for (int c = 0; c < kDim; ++c) {
      int n = coherence_order(r, c);
      double f = std::exp(-entry_decay_rate(model, r, c) * t);
      auto [it, inserted] = factor_by_n2.try_emplace(n * n, f);
      CHECK(f == doctest::Approx(it->second).epsilon(1e-15));
    }
  CHECK(factor_by_n2.size() == 4);  // n^2 in {0, 1, 4, 9}
}

TEST_CASE("monte carlo with a single zero-variance sample is the identity") {
  std::mt19937_64 rng(9104);
  DensityMatrix dm = random_density_matrix(rng);
  // t = 0 forces every theta to zero.
  DensityMatrix out =
      monte_carlo_dephasing(dm, DephasingModel::correlated(1.0), 0.0, 1, 42);
  CHECK(max_abs_diff(out.mat, dm.mat) < 1e-15);
}

TEST_CASE("monte carlo never moves diagonal entries") {
  std::mt19937_64 rng(9105);
  DensityMatrix dm = random_density_matrix(rng);
  DensityMatrix out = monte_carlo_dephasing(
      dm, DephasingModel::independent(1.1, 0.6, 3.0), 0.8, 500, 7);
  for (int b = 0; b < kDim; ++b)
    CHECK(std::abs(out.mat(b, b) - dm.mat(b, b)) < 1e-15);
}

TEST_CASE("monte carlo is deterministic for a fixed seed") {
  std::mt19937_64 rng(9106);
  DensityMatrix dm = random_density_matrix(rng);
  auto model = DephasingModel::correlated(1.0);
  DensityMatrix a = monte_carlo_dephasing(dm, model, 0.5, 2000, 99);
  DensityMatrix b = monte_carlo_dephasing(dm, model, 0.5, 2000, 99);
  CHECK(max_abs_diff(a.mat, b.mat) == 0.0);
  DensityMatrix c = monte_carlo_dephasing(dm, model, 0.5, 2000, 100);
  CHECK(max_abs_diff(a.mat, c.mat) > 0.0);
}

TEST_CASE("monte carlo agrees with the analytic channel within 3 sigma") {
  // The central oracle-equivalence check of this module, run on the encoded
  // state at t = tau.
  ProductOperatorSum rho_b;
  rho_b.terms = {term(X, Identity, Identity, 0.25),
                 term(Identity, X, Identity, 0.25),
                 term(Identity, Identity, X, 0.25), term(X, X, X, 1.0)};
  DensityMatrix in = po_to_matrix(rho_b, Convention::Deviation);
  auto model = DephasingModel::correlated(0.8);
  double t = 0.8;
  auto stats = monte_carlo_dephasing_stats(in, model, t, 100000, 20260809);
  DensityMatrix exact = apply_dephasing(in, model, t);
  for (int r = 0; r < kDim; ++r)
    for (int c = 0; c < kDim; ++c) {
      double dre = std::abs(stats.mean.mat(r, c).real() -
                            exact.mat(r, c).real());
      double dim = std::abs(stats.mean.mat(r, c).imag() -
                            exact.mat(r, c).imag());
      CHECK(dre <= 3.0 * stats.se_real(r, c) + 1e-12);
      CHECK(dim <= 3.0 * stats.se_imag(r, c) + 1e-12);
    }
}

TEST_CASE("monte carlo error shrinks like the square root of the samples") {
  std::mt19937_64 rng(9107);
  DensityMatrix dm = random_density_matrix(rng);
  auto model = DephasingModel::independent(1.1, 0.6, 3.0);
  double t = 0.6;
  DensityMatrix exact = apply_dephasing(dm, model, t);
  double err_small =
      max_abs_diff(monte_carlo_dephasing(dm, model, t, 1000, 5).mat, exact.mat);
  double err_large = max_abs_diff(
      monte_carlo_dephasing(dm, model, t, 100000, 5).mat, exact.mat);
  double ratio = err_small / err_large;
  CHECK(ratio > 5.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("short-time leakage lands in the error subspaces at half rate") {
  // First-order expansion of the channel: the population that leaves an
  // encoded state shows up in the single-error subspaces with weight
  // (rate_i / 2) t, mirroring the first-order error branches.
  std::mt19937_64 rng(9108);
  auto [alpha, beta] = random_amplitudes(rng);

  Matrix8 enc = circuit_unitary(encoder_circuit());
  Eigen::Vector<Complex, 8> logical = Eigen::Vector<Complex, 8>::Zero();
  logical(0b000) = alpha;
  logical(0b100) = beta;
  Eigen::Vector<Complex, 8> psi = enc * logical;

  std::vector<Eigen::Vector<Complex, 8>> error_branch;
  for (int spin = 1; spin <= 3; ++spin) {
    Matrix8 z = Matrix8::Zero();
    int bit = 1 << (kSpins - spin);
    for (int b = 0; b < kDim; ++b) z(b, b) = (b & bit) ? -1.0 : 1.0;
    error_branch.push_back(z * psi);
  }

  DensityMatrix rho{psi * psi.adjoint(), Convention::FullTrace};
  const double t = 1e-6;
  for (const auto& model :
       {DephasingModel::correlated(0.7),
        DephasingModel::independent(1.1, 0.6, 3.0)}) {
    std::array<double, 3> rates{};
    if (model.kind == DephasingModel::Kind::Correlated)
      rates = {1.0 / model.tau, 1.0 / model.tau, 1.0 / model.tau};
    else
      rates = {1.0 / model.t2[0], 1.0 / model.t2[1], 1.0 / model.t2[2]};

    DensityMatrix evolved = apply_dephasing(rho, model, t);
    for (int i = 0; i < 3; ++i) {
      double population =
          (error_branch[i].adjoint() * evolved.mat * error_branch[i])(0, 0)
              .real();
      CHECK(population / t ==
            doctest::Approx(rates[i] / 2.0).epsilon(1e-3));
    }
  }
}
