#include "nmrqec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nmrqec {

namespace {

struct LineFit {
  double slope;
  double intercept;
  double residual_norm;
};

LineFit least_squares_line(const std::vector<double>& x,
                           const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (det == 0.0) throw NumericalError("degenerate delay grid in linear fit");
  LineFit fit{};
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual_norm = std::sqrt(ss);
  return fit;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void DecayCurve::validate() const {
  if (intensities.size() != delays.size())
    throw std::invalid_argument("curve '" + label +
                                "': delay/intensity size mismatch");
  if (!sigmas.empty() && sigmas.size() != delays.size())
    throw std::invalid_argument("curve '" + label + "': sigma size mismatch");
  for (std::size_t i = 1; i < delays.size(); ++i)
    if (delays[i] <= delays[i - 1])
      throw std::invalid_argument("curve '" + label +
                                  "': delays must be strictly increasing");
}

double DecayCurve::interpolate(double delay) const {
  if (delays.empty()) throw std::invalid_argument("empty curve");
  if (delay < delays.front() || delay > delays.back())
    throw std::invalid_argument("curve '" + label +
                                "': delay outside sampled range");
  auto hi = std::lower_bound(delays.begin(), delays.end(), delay);
  if (hi == delays.begin()) return intensities.front();
  std::size_t j = static_cast<std::size_t>(hi - delays.begin());
  if (j == delays.size() || delays[j] == delay)
    return intensities[j == delays.size() ? j - 1 : j];
  double t0 = delays[j - 1], t1 = delays[j];
  double w = (delay - t0) / (t1 - t0);
  return (1.0 - w) * intensities[j - 1] + w * intensities[j];
}

FitResult fit_log_linear(const DecayCurve& curve) {
  curve.validate();
  if (curve.size() < 3)
    throw std::invalid_argument("curve '" + curve.label +
                                "': need at least 3 points to fit");
  std::vector<double> logs(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.intensities[i] <= 0.0)
      throw std::invalid_argument(
          "curve '" + curve.label + "': non-positive intensity " +
          format_double(curve.intensities[i]) + " at delay " +
          format_double(curve.delays[i]) + " cannot be log-fitted");
    logs[i] = std::log(curve.intensities[i]);
  }
  LineFit fit = least_squares_line(curve.delays, logs);
  return {fit.slope, fit.intercept, fit.residual_norm,
          FitMethod::LogLinearLeastSquares};
}

FitResult fit_single_exponential(const DecayCurve& curve) {
  curve.validate();
  if (curve.size() < 3)
    throw std::invalid_argument("curve '" + curve.label +
                                "': need at least 3 points to fit");

  // Start from the log-linear estimate when the data allows it.
  double a = curve.intensities.front();
  double k = 0.0;
  bool all_positive = std::all_of(curve.intensities.begin(),
                                  curve.intensities.end(),
                                  [](double v) { return v > 0.0; });
  bool all_negative = std::all_of(curve.intensities.begin(),
                                  curve.intensities.end(),
                                  [](double v) { return v < 0.0; });
  if (all_positive || all_negative) {
    DecayCurve absed = curve;
    for (double& v : absed.intensities) v = std::abs(v);
    k = -fit_log_linear(absed).slope;
  }
  if (a == 0.0) a = all_negative ? -1.0 : 1.0;

  const int max_iterations = 100;
  const double step_tol = 1e-12;
  double ss = 0.0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Normal equations J^T J delta = -J^T r with residual r = a e^{-kt} - I.
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, g0 = 0.0, g1 = 0.0;
    ss = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      double t = curve.delays[i];
      double e = std::exp(-k * t);
      double r = a * e - curve.intensities[i];
      double ja = e;
      double jk = -a * t * e;
      jtj00 += ja * ja;
      jtj01 += ja * jk;
      jtj11 += jk * jk;
      g0 += ja * r;
      g1 += jk * r;
      ss += r * r;
    }
    double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (det == 0.0)
      throw NumericalError("curve '" + curve.label +
                           "': singular normal equations in exponential fit");
    double da = -(jtj11 * g0 - jtj01 * g1) / det;
    double dk = -(jtj00 * g1 - jtj01 * g0) / det;
    a += da;
    k += dk;
    if (std::abs(da) + std::abs(dk) <
        step_tol * (1.0 + std::abs(a) + std::abs(k)))
      return {-k, std::log(std::abs(a)), std::sqrt(ss),
              FitMethod::SingleExponential};
  }
  throw NumericalError("curve '" + curve.label +
                       "': exponential fit did not converge in 100 iterations");
}

FitResult initial_slope(const DecayCurve& curve, int window_points) {
  curve.validate();
  if (window_points < 3)
    throw std::invalid_argument("slope window must cover at least 3 points");
  if (curve.size() < static_cast<std::size_t>(window_points))
    throw std::invalid_argument("curve '" + curve.label + "': only " +
                                std::to_string(curve.size()) +
                                " points near t = 0, need " +
                                std::to_string(window_points));
  DecayCurve head;
  head.label = curve.label;
  head.delays.assign(curve.delays.begin(), curve.delays.begin() + window_points);
  head.intensities.assign(curve.intensities.begin(),
                          curve.intensities.begin() + window_points);
  return fit_log_linear(head);
}

DecayCurve recombine_pseudopure(const std::vector<DecayCurve>& curves,
                                const std::vector<TermWeight>& weights,
                                const std::string& result_label) {
  if (curves.size() != weights.size())
    throw std::invalid_argument("need exactly one weight per curve");
  std::vector<const DecayCurve*> ordered;
  for (const auto& w : weights) {
    const DecayCurve* match = nullptr;
    for (const auto& c : curves) {
      if (c.label != w.label) continue;
      if (match)
        throw std::invalid_argument("duplicate curve label '" + w.label + "'");
      match = &c;
    }
    if (!match)
      throw std::invalid_argument("no curve labeled '" + w.label + "'");
    ordered.push_back(match);
  }
  for (const auto* c : ordered) c->validate();

  // Common grid: the first curve's delays, clipped to the range every curve
  // covers; off-grid curves are linearly interpolated.
  double lo = ordered.front()->delays.front();
  double hi = ordered.front()->delays.back();
  for (const auto* c : ordered) {
    lo = std::max(lo, c->delays.front());
    hi = std::min(hi, c->delays.back());
  }
  if (lo > hi)
    throw std::invalid_argument("curves share no overlapping delay range");

  DecayCurve out;
  out.label = result_label;
  for (double t : ordered.front()->delays) {
    if (t < lo || t > hi) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < ordered.size(); ++i)
      sum += weights[i].weight * ordered[i]->interpolate(t);
    out.delays.push_back(t);
    out.intensities.push_back(sum);
  }
  if (out.size() < 3)
    throw std::invalid_argument("recombined grid has fewer than 3 points");
  return out;
}

std::string curve_to_csv(const DecayCurve& curve) {
  std::string out = curve.sigmas.empty() ? "delay,intensity\n"
                                         : "delay,intensity,sigma\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += format_double(curve.delays[i]);
    out += ',';
    out += format_double(curve.intensities[i]);
    if (!curve.sigmas.empty()) {
      out += ',';
      out += format_double(curve.sigmas[i]);
    }
    out += '\n';
  }
  return out;
}

DecayCurve curve_from_csv(const std::string& text, const std::string& label) {
  DecayCurve curve;
  curve.label = label;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line.rfind("delay,intensity", 0) != 0)
        throw std::invalid_argument(
            "CSV line " + std::to_string(line_number) +
            ": expected header 'delay,intensity[,sigma]'");
      saw_header = true;
      continue;
    }
    double t = 0.0, v = 0.0, s = 0.0;
    int fields = std::sscanf(line.c_str(), "%lg,%lg,%lg", &t, &v, &s);
    if (fields < 2)
      throw std::invalid_argument("CSV line " + std::to_string(line_number) +
                                  ": expected 'delay,intensity[,sigma]'");
    curve.delays.push_back(t);
    curve.intensities.push_back(v);
    if (fields == 3) curve.sigmas.push_back(s);
  }
  if (!curve.sigmas.empty() && curve.sigmas.size() != curve.size())
    throw std::invalid_argument("CSV: sigma column must be all-or-none");
  curve.validate();
  return curve;
}

DecayCurve load_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open curve file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string label = path;
  if (auto slash = label.find_last_of('/'); slash != std::string::npos)
    label.erase(0, slash + 1);
  if (auto dot = label.find_last_of('.'); dot != std::string::npos)
    label.erase(dot);
  return curve_from_csv(buf.str(), label);
}

void save_curve_csv(const DecayCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write curve file: " + path);
  out << curve_to_csv(curve);
}

}  // namespace nmrqec
