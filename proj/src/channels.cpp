#include "nmrqec/channels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nmrqec {

namespace {

// splitmix64: counter-based, so sample i is reproducible in isolation.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t bits) {
  return (bits >> 11) * 0x1.0p-53 + 0x1.0p-54;  // in (0,1)
}

// Box-Muller from two counter-derived uniforms.
double standard_normal(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t base = splitmix64(seed ^ splitmix64(stream));
  double u1 = uniform01(splitmix64(base));
  double u2 = uniform01(splitmix64(base + 0x632be59bd9b4e019ULL));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void check_time(double t) {
  if (t < 0.0) throw std::invalid_argument("dephasing duration must be >= 0");
}

}  // namespace

DephasingModel DephasingModel::correlated(double tau) {
  if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
  DephasingModel m;
  m.kind = Kind::Correlated;
  m.tau = tau;
  return m;
}

DephasingModel DephasingModel::independent(double t2_spin1, double t2_spin2,
                                           double t2_spin3) {
  if (t2_spin1 <= 0.0 || t2_spin2 <= 0.0 || t2_spin3 <= 0.0)
    throw std::invalid_argument("T2 constants must be positive");
  DephasingModel m;
  m.kind = Kind::Independent;
  m.t2 = {t2_spin1, t2_spin2, t2_spin3};
  return m;
}

double DephasingModel::reference_time() const {
  if (kind == Kind::Correlated) return tau;
  return std::min({t2[0], t2[1], t2[2]});
}

double gradient_diffusion_rate(const GradientDiffusionParams& p) {
  if (p.delta < 0.0 || p.diffusion < 0.0)
    throw std::invalid_argument(
        "gradient duration and diffusion constant must be >= 0");
  double dphi_dz = p.gamma * p.gradient * p.delta * p.order;
  return dphi_dz * dphi_dz * p.diffusion;
}

double entry_decay_rate(const DephasingModel& model, int row, int col) {
  if (model.kind == DephasingModel::Kind::Correlated) {
    double n = coherence_order(row, col);
    return n * n / model.tau;
  }
  double rate = 0.0;
  for (int spin = 0; spin < kSpins; ++spin) {
    int bit = 1 << (kSpins - 1 - spin);
    if ((row & bit) != (col & bit)) rate += 1.0 / model.t2[spin];
  }
  return rate;
}

DensityMatrix apply_dephasing(const DensityMatrix& dm,
                              const DephasingModel& model, double t) {
  check_time(t);
  DensityMatrix out;
  out.convention = dm.convention;
  for (int r = 0; r < kDim; ++r)
    for (int c = 0; c < kDim; ++c)
      out.mat(r, c) = dm.mat(r, c) * std::exp(-entry_decay_rate(model, r, c) * t);
  return out;
}

// Phase variance calibration. A sample applies exp(-i theta_i sigma_z^i), so
// entry (b,b') picks up exp(-i sum_i theta_i d_i) with d_i = (-1)^{b_i} -
// (-1)^{b'_i} in {0, +-2}. For a zero-mean Gaussian, E[exp(-i theta d)] =
// exp(-d^2 var/2).
//   Independent: var_i = t / (2 T2_i) gives exp(-t/T2_i) per differing spin.
//   Correlated:  one shared theta, sum_i d_i = 2 n(b,b'), so var = t/(2 tau)
//                gives exp(-n^2 t/tau).
std::array<double, 3> sample_phases(const DephasingModel& model, double t,
                                    std::uint64_t seed, long sample_index) {
  check_time(t);
  auto idx = static_cast<std::uint64_t>(sample_index);
  if (model.kind == DephasingModel::Kind::Correlated) {
    double sigma = std::sqrt(t / (2.0 * model.tau));
    double theta = sigma * standard_normal(seed, 3 * idx);
    return {theta, theta, theta};
  }
  std::array<double, 3> thetas{};
  for (int spin = 0; spin < kSpins; ++spin) {
    double sigma = std::sqrt(t / (2.0 * model.t2[spin]));
    thetas[spin] = sigma * standard_normal(seed, 3 * idx + spin);
  }
  return thetas;
}

namespace {

// Diagonal unitary phases: U(theta)|b> = exp(-i phi(b))|b> with
// phi(b) = sum_i theta_i (-1)^{b_i}.
std::array<double, kDim> basis_phases(const std::array<double, 3>& thetas) {
  std::array<double, kDim> phi{};
  for (int b = 0; b < kDim; ++b) {
    double p = 0.0;
    for (int spin = 0; spin < kSpins; ++spin) {
      int bit = 1 << (kSpins - 1 - spin);
      p += (b & bit) ? -thetas[spin] : thetas[spin];
    }
    phi[b] = p;
  }
  return phi;
}

}  // namespace

MonteCarloStats monte_carlo_dephasing_stats(const DensityMatrix& dm,
                                            const DephasingModel& model,
                                            double t, long samples,
                                            std::uint64_t seed) {
  check_time(t);
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");

  // Welford accumulation of the per-sample entry values
  // rho(b,b') exp(-i (phi(b) - phi(b'))).
  Eigen::Matrix<Complex, 8, 8> mean = Eigen::Matrix<Complex, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 8> m2_re = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 8> m2_im = Eigen::Matrix<double, 8, 8>::Zero();

  for (long i = 0; i < samples; ++i) {
    auto phi = basis_phases(sample_phases(model, t, seed, i));
    double inv_n = 1.0 / static_cast<double>(i + 1);
    for (int r = 0; r < kDim; ++r)
      for (int c = 0; c < kDim; ++c) {
        double d = phi[r] - phi[c];
        Complex v = dm.mat(r, c) * Complex(std::cos(d), -std::sin(d));
        Complex delta = v - mean(r, c);
        mean(r, c) += delta * inv_n;
        Complex delta2 = v - mean(r, c);
        m2_re(r, c) += delta.real() * delta2.real();
        m2_im(r, c) += delta.imag() * delta2.imag();
      }
  }

  MonteCarloStats out;
  out.mean.convention = dm.convention;
  out.mean.mat = mean;
  double inv_sqrt = samples > 1 ? 1.0 / std::sqrt(static_cast<double>(samples) *
                                                  (samples - 1))
                                : 0.0;
  out.se_real = m2_re.cwiseSqrt() * inv_sqrt;
  out.se_imag = m2_im.cwiseSqrt() * inv_sqrt;
  return out;
}

DensityMatrix monte_carlo_dephasing(const DensityMatrix& dm,
                                    const DephasingModel& model, double t,
                                    long samples, std::uint64_t seed) {
  return monte_carlo_dephasing_stats(dm, model, t, samples, seed).mean;
}

}  // namespace nmrqec
