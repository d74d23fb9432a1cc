#pragma once

#include <array>
#include <cstdint>

#include "nmrqec/qstate.hpp"

// Phase-noise models. The analytic channel multiplies each density-matrix
// entry by exp(-Gamma(b,b') t); the Monte Carlo channel averages random
// z-rotations and converges to the analytic map. Both are completely
// positive, trace preserving and unital.

namespace nmrqec {

struct DephasingModel {
  enum class Kind : std::uint8_t { Correlated, Independent };

  Kind kind = Kind::Correlated;
  double tau = 1.0;                        // correlated time constant (s)
  std::array<double, 3> t2{1.0, 1.0, 1.0};  // per-spin T2 (s)

  static DephasingModel correlated(double tau);
  static DephasingModel independent(double t2_spin1, double t2_spin2,
                                    double t2_spin3);

  // Shortest time constant of the model; a natural unit for delay grids and
  // slope thresholds.
  double reference_time() const;
};

struct GradientDiffusionParams {
  double gamma = 0.0;      // gyromagnetic ratio (rad / s / T)
  double gradient = 0.0;   // dBz/dz (T / m)
  double delta = 0.0;      // gradient-on duration (s)
  double diffusion = 0.0;  // D (m^2 / s)
  int order = 0;           // coherence order n
};

// 1/tau = gamma^2 (dBz/dz)^2 n^2 delta^2 D.
double gradient_diffusion_rate(const GradientDiffusionParams& p);

// Decay exponent Gamma(b,b') of one entry: n(b,b')^2 / tau for the
// correlated model, sum of 1/T2_i over the spins whose bits differ for the
// independent model.
double entry_decay_rate(const DephasingModel& model, int row, int col);

DensityMatrix apply_dephasing(const DensityMatrix& dm,
                              const DephasingModel& model, double t);

// Average of U(theta) rho U(theta)^dagger over Gaussian random phases,
// U(theta) = exp(-i sum_i theta_i sigma_z^i). Deterministic for a given
// seed; sample i draws its phases from a counter-based generator, so the
// result does not depend on any internal partitioning.
DensityMatrix monte_carlo_dephasing(const DensityMatrix& dm,
                                    const DephasingModel& model, double t,
                                    long samples, std::uint64_t seed);

struct MonteCarloStats {
  DensityMatrix mean;
  // Entrywise standard error of the sample mean, real and imaginary parts.
  Eigen::Matrix<double, 8, 8> se_real;
  Eigen::Matrix<double, 8, 8> se_imag;
};

MonteCarloStats monte_carlo_dephasing_stats(const DensityMatrix& dm,
                                            const DephasingModel& model,
                                            double t, long samples,
                                            std::uint64_t seed);

// Zero-mean Gaussian phase triple for one sample; correlated models share
// one angle across the three spins.
std::array<double, 3> sample_phases(const DephasingModel& model, double t,
                                    std::uint64_t seed, long sample_index);

}  // namespace nmrqec
