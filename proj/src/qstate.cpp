#include "nmrqec/qstate.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace nmrqec {

namespace {

const Complex kI(0.0, 1.0);

Matrix2 pauli(SpinAxis axis) {
  Matrix2 m;
  switch (axis) {
    case SpinAxis::Identity:
      m << 1, 0, 0, 1;
      break;
    case SpinAxis::X:
      m << 0, 1, 1, 0;
      break;
    case SpinAxis::Y:
      m << 0, -kI, kI, 0;
      break;
    case SpinAxis::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

}  // namespace

Matrix2 single_spin_op(SpinAxis axis) {
  if (axis == SpinAxis::Identity) return Matrix2::Identity();
  return 0.5 * pauli(axis);
}

Matrix8 term_matrix(const ProductOperatorTerm& term) {
  Matrix8 m = Eigen::kroneckerProduct(
                  single_spin_op(term.axes[0]),
                  Eigen::kroneckerProduct(single_spin_op(term.axes[1]),
                                          single_spin_op(term.axes[2]))
                      .eval())
                  .eval();
  return term.coefficient * m;
}

ProductOperatorSum ProductOperatorSum::canonical(double drop_tol) const {
  std::map<std::array<SpinAxis, 3>, double> merged;
  for (const auto& t : terms) merged[t.axes] += t.coefficient;
  ProductOperatorSum out;
  for (const auto& [axes, coeff] : merged) {
    if (std::abs(coeff) > drop_tol) out.terms.push_back({axes, coeff});
  }
  return out;
}

double ProductOperatorSum::coefficient(SpinAxis a1, SpinAxis a2,
                                       SpinAxis a3) const {
  double c = 0.0;
  for (const auto& t : terms) {
    if (t.axes[0] == a1 && t.axes[1] == a2 && t.axes[2] == a3)
      c += t.coefficient;
  }
  return c;
}

ProductOperatorSum operator+(const ProductOperatorSum& a,
                             const ProductOperatorSum& b) {
  ProductOperatorSum out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out.canonical();
}

ProductOperatorSum operator*(double scale, const ProductOperatorSum& s) {
  ProductOperatorSum out = s;
  for (auto& t : out.terms) t.coefficient *= scale;
  return out;
}

double DensityMatrix::hermiticity_error() const {
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::trace_error() const {
  Complex tr = mat.trace();
  if (convention == Convention::FullTrace) return std::abs(tr - 1.0);
  return std::abs(tr);
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix8> es(mat);
  return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_valid(double algebra_tol, double positivity_tol) const {
  if (hermiticity_error() > algebra_tol) return false;
  if (trace_error() > algebra_tol) return false;
  if (convention == Convention::FullTrace &&
      min_eigenvalue() < -positivity_tol)
    return false;
  return true;
}

int coherence_order(int row, int col) {
  return std::popcount(static_cast<unsigned>(col)) -
         std::popcount(static_cast<unsigned>(row));
}

DensityMatrix po_to_matrix(const ProductOperatorSum& sum,
                           Convention convention) {
  Matrix8 m = Matrix8::Zero();
  bool saw_identity_term = false;
  for (const auto& t : sum.terms) {
    if (t.is_identity_term()) {
      saw_identity_term = true;
      if (convention == Convention::Deviation) continue;
    }
    m += term_matrix(t);
  }
  if (convention == Convention::FullTrace && !saw_identity_term)
    m += Matrix8::Identity() / 8.0;
  return {m, convention};
}

ProductOperatorSum matrix_to_po(const DensityMatrix& dm, double drop_tol) {
  static const std::array<SpinAxis, 4> kAxes = {SpinAxis::Identity, SpinAxis::X,
                                                SpinAxis::Y, SpinAxis::Z};
  ProductOperatorSum out;
  for (SpinAxis a1 : kAxes)
    for (SpinAxis a2 : kAxes)
      for (SpinAxis a3 : kAxes) {
        ProductOperatorTerm basis{{a1, a2, a3}, 1.0};
        Matrix8 b = term_matrix(basis);
        // Basis elements are HS-orthogonal but not normalized: <B,B> is 2
        // per identity axis and 1/2 per Pauli axis.
        double norm_sq = (b.adjoint() * b).trace().real();
        Complex overlap = (b.adjoint() * dm.mat).trace();
        double coeff = overlap.real() / norm_sq;
        if (std::abs(coeff) > drop_tol) out.terms.push_back({basis.axes, coeff});
      }
  return out.canonical(drop_tol);
}

std::vector<CoherenceComponent> coherence_decompose(const DensityMatrix& dm) {
  std::vector<CoherenceComponent> out(7);
  for (int n = -3; n <= 3; ++n) {
    out[n + 3].order = n;
    out[n + 3].component.convention = dm.convention;
  }
  for (int r = 0; r < kDim; ++r)
    for (int c = 0; c < kDim; ++c)
      out[coherence_order(r, c) + 3].component.mat(r, c) = dm.mat(r, c);
  return out;
}

DensityMatrix coherence_filter(const DensityMatrix& dm,
                               const std::vector<int>& absolute_orders) {
  DensityMatrix out;
  out.convention = dm.convention;
  for (int r = 0; r < kDim; ++r)
    for (int c = 0; c < kDim; ++c) {
      int n = std::abs(coherence_order(r, c));
      if (std::find(absolute_orders.begin(), absolute_orders.end(), n) !=
          absolute_orders.end())
        out.mat(r, c) = dm.mat(r, c);
    }
  return out;
}

ReducedState partial_trace_to_spin1(const DensityMatrix& dm) {
  ReducedState out;
  out.convention = dm.convention;
  for (int b1 = 0; b1 < 2; ++b1)
    for (int c1 = 0; c1 < 2; ++c1) {
      Complex sum = 0.0;
      for (int anc = 0; anc < 4; ++anc) sum += dm.mat(4 * b1 + anc, 4 * c1 + anc);
      out.mat(b1, c1) = sum;
    }
  return out;
}

DensityMatrix pseudopure_input(const Matrix2& rho1) {
  if ((rho1 - rho1.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol)
    throw std::invalid_argument("pseudopure_input: rho1 must be Hermitian");
  Matrix2 ground = 0.5 * Matrix2::Identity() + single_spin_op(SpinAxis::Z);
  Matrix8 m = Eigen::kroneckerProduct(
                  rho1, Eigen::kroneckerProduct(ground, ground).eval())
                  .eval();
  DensityMatrix out;
  out.mat = m;
  out.convention = std::abs(rho1.trace()) < 0.5 ? Convention::Deviation
                                                : Convention::FullTrace;
  return out;
}

std::string dump_matrix(const Matrix8& m) {
  std::string out;
  char buf[64];
  for (int r = 0; r < kDim; ++r) {
    for (int c = 0; c < kDim; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", m(r, c).real(),
                    m(r, c).imag());
      out += buf;
      out += (c + 1 < kDim) ? ' ' : '\n';
    }
  }
  return out;
}

Matrix8 parse_matrix_dump(const std::string& text) {
  Matrix8 m = Matrix8::Zero();
  std::istringstream in(text);
  std::string cell;
  for (int r = 0; r < kDim; ++r)
    for (int c = 0; c < kDim; ++c) {
      if (!(in >> cell))
        throw std::invalid_argument("matrix dump: expected 64 entries");
      double re = 0.0, im = 0.0;
      if (std::sscanf(cell.c_str(), "%lg,%lg", &re, &im) != 2)
        throw std::invalid_argument("matrix dump: bad entry '" + cell + "'");
      m(r, c) = Complex(re, im);
    }
  return m;
}

}  // namespace nmrqec
