#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Decay-curve post-processing: log-linear and single-exponential fits,
// initial-slope estimation on the first few points, and the pointwise
// weighted recombination that turns per-product-operator experiments into a
// pseudopure result. Curves travel as CSV ("delay,intensity[,sigma]").

namespace nmrqec {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecayCurve {
  std::string label;
  std::vector<double> delays;
  std::vector<double> intensities;
  std::vector<double> sigmas;  // empty or same size as delays

  std::size_t size() const { return delays.size(); }
  void validate() const;  // strictly increasing delays, matched lengths
  // Intensity at an arbitrary delay by linear interpolation; delay must lie
  // inside the sampled range.
  double interpolate(double delay) const;
};

enum class FitMethod : std::uint8_t { LogLinearLeastSquares, SingleExponential };

struct FitResult {
  double slope = 0.0;      // initial log-slope, -k for a exp(-k t)
  double intercept = 0.0;  // ln(amplitude)
  double residual_norm = 0.0;
  FitMethod method = FitMethod::LogLinearLeastSquares;
};

// Ordinary least squares on (t, ln I). Rejects non-positive intensities,
// naming the offending point.
FitResult fit_log_linear(const DecayCurve& curve);

// Nonlinear least squares on I = a exp(-k t), Gauss-Newton with the
// analytic Jacobian, at most 100 iterations, step tolerance 1e-12. Accepts
// negative intensities. Throws NumericalError on non-convergence.
FitResult fit_single_exponential(const DecayCurve& curve);

// Log-linear fit restricted to the first window_points points (default 4).
FitResult initial_slope(const DecayCurve& curve, int window_points = 4);

struct TermWeight {
  std::string label;
  double weight = 0.0;
};

// Pointwise weighted sum of labeled curves. Every weight must name exactly
// one curve and every curve must be used. Curves on mismatched delay grids
// are linearly interpolated onto the first curve's grid restricted to the
// range shared by all curves.
DecayCurve recombine_pseudopure(const std::vector<DecayCurve>& curves,
                                const std::vector<TermWeight>& weights,
                                const std::string& result_label = "recombined");

// CSV with header "delay,intensity" or "delay,intensity,sigma"; '#' lines
// are comments.
std::string curve_to_csv(const DecayCurve& curve);
DecayCurve curve_from_csv(const std::string& text, const std::string& label);
DecayCurve load_curve_csv(const std::string& path);
void save_curve_csv(const DecayCurve& curve, const std::string& path);

}  // namespace nmrqec
