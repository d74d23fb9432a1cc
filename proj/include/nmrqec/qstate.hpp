#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Exact state algebra for a three-spin-1/2 system: 8x8 density matrices in
// the computational basis |b1 b2 b3> (spin 1 most significant), product
// operator sums over {1, Ix, Iy, Iz} with Iu = sigma_u / 2, coherence-order
// decomposition and partial trace onto spin 1.

namespace nmrqec {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix8 = Eigen::Matrix<Complex, 8, 8>;

constexpr int kSpins = 3;
constexpr int kDim = 8;

// Algebraic identities hold to rounding error on 8x8 matrices; positivity
// checks get a little more slack because eigenvalues of near-degenerate
// states wobble more than entries do.
constexpr double kAlgebraTol = 1e-12;
constexpr double kPositivityTol = 1e-10;

enum class SpinAxis : std::uint8_t { Identity = 0, X = 1, Y = 2, Z = 3 };

enum class Convention : std::uint8_t { Deviation, FullTrace };

// 2x2 realization of one axis label: unit matrix for Identity, sigma_u/2
// for X, Y, Z.
Matrix2 single_spin_op(SpinAxis axis);

// One weighted Kronecker product of per-spin operators, e.g.
// {Z, Identity, Identity} with coefficient 1 is Iz on spin 1.
struct ProductOperatorTerm {
  std::array<SpinAxis, 3> axes{SpinAxis::Identity, SpinAxis::Identity,
                               SpinAxis::Identity};
  double coefficient = 0.0;

  bool is_identity_term() const {
    return axes[0] == SpinAxis::Identity && axes[1] == SpinAxis::Identity &&
           axes[2] == SpinAxis::Identity;
  }
};

Matrix8 term_matrix(const ProductOperatorTerm& term);

struct ProductOperatorSum {
  std::vector<ProductOperatorTerm> terms;

  // Canonical form: at most one term per axes triple, zero terms dropped,
  // fixed (lexicographic) ordering.
  ProductOperatorSum canonical(double drop_tol = 1e-13) const;

  double coefficient(SpinAxis a1, SpinAxis a2, SpinAxis a3) const;
};

ProductOperatorSum operator+(const ProductOperatorSum& a,
                             const ProductOperatorSum& b);
ProductOperatorSum operator*(double scale, const ProductOperatorSum& s);

struct DensityMatrix {
  Matrix8 mat = Matrix8::Zero();
  Convention convention = Convention::Deviation;

  double hermiticity_error() const;
  // |trace - 1| for full-trace states, |trace| for deviation states.
  double trace_error() const;
  double min_eigenvalue() const;
  bool is_valid(double algebra_tol = kAlgebraTol,
                double positivity_tol = kPositivityTol) const;
};

// 2x2 state of spin 1 after tracing out the ancillas.
struct ReducedState {
  Matrix2 mat = Matrix2::Zero();
  Convention convention = Convention::Deviation;
};

// Slice of a density matrix with definite coherence order: entry (b, b')
// survives only if popcount(b') - popcount(b) == order.
struct CoherenceComponent {
  int order = 0;  // -3 ... +3
  DensityMatrix component;
};

// Difference of total z angular momentum (units hbar/2) between |row> and
// |col>; the decay exponent of correlated dephasing scales as its square.
int coherence_order(int row, int col);

// Kronecker-product realization of a product-operator sum. The deviation
// convention drops any all-identity term; the full-trace convention keeps an
// explicit identity term when present and otherwise supplies unit trace as
// (1/8)*1.
DensityMatrix po_to_matrix(const ProductOperatorSum& sum,
                           Convention convention);

// Hilbert-Schmidt projection onto the 64 product-operator basis elements.
// Inverse of po_to_matrix on canonical sums.
ProductOperatorSum matrix_to_po(const DensityMatrix& dm,
                                double drop_tol = 1e-13);

// All seven coherence components, orders -3..+3 in order. They sum to the
// input exactly; this projection is the mathematical model of gradient
// labeling.
std::vector<CoherenceComponent> coherence_decompose(const DensityMatrix& dm);

// Keep only the components whose |order| is listed.
DensityMatrix coherence_filter(const DensityMatrix& dm,
                               const std::vector<int>& absolute_orders);

ReducedState partial_trace_to_spin1(const DensityMatrix& dm);

// rho1 (x) (1/2 + Iz) (x) (1/2 + Iz): spin 1 carries rho1, the ancillas sit
// in the pseudopure ground configuration. The output convention follows the
// trace of rho1 (traceless input -> deviation state).
DensityMatrix pseudopure_input(const Matrix2& rho1);

// Plain-text dump, one row per line, entries as "re,im" separated by spaces.
std::string dump_matrix(const Matrix8& m);
Matrix8 parse_matrix_dump(const std::string& text);

}  // namespace nmrqec
