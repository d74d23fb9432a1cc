#include "nmrqec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "nmrqec/svg_plot.hpp"

namespace nmrqec {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Evaluate fn(i) for i in [0, n) on a small worker pool; results come back
// ordered by index, so the output never depends on scheduling.
template <typename Fn>
auto parallel_map(int n, Fn&& fn) {
  using Value = decltype(fn(0));
  std::vector<Value> out(static_cast<std::size_t>(n));
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (n <= 1 || workers == 1) {
    for (int i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<Value>> futures;
  futures.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    futures.push_back(std::async(std::launch::deferred | std::launch::async,
                                 [&fn, i] { return fn(i); }));
  for (int i = 0; i < n; ++i) out[i] = futures[i].get();
  return out;
}

// Per-delay-point Monte Carlo seed; depends only on the configured seed and
// the point index.
std::uint64_t point_seed(std::uint64_t seed, int index) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  return x ^ (x >> 27);
}

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Alanine:
      return "alanine";
    case ExperimentKind::Tce:
      return "tce";
    default:
      return "custom";
  }
}

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::DecodeOnly:
      return "decode";
    case RunMode::Corrected:
      return "correct";
    default:
      return "both";
  }
}

struct IniData {
  // section -> key -> value, plus the order keys appeared in.
  std::map<std::string, std::map<std::string, std::string>> values;

  const std::string* find(const std::string& section,
                          const std::string& key) const {
    auto s = values.find(section);
    if (s == values.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }
};

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

IniData parse_ini(const std::string& text) {
  IniData ini;
  std::istringstream in(text);
  std::string line, section;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_number) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || section.empty())
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": key outside a [section]");
    ini.values[section][key] = value;
  }
  return ini;
}

double parse_number(const std::string& v, const std::string& what) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + what + ": '" + v + "'");
  }
}

long parse_integer(const std::string& v, const std::string& what) {
  try {
    std::size_t used = 0;
    long n = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + what + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for " + what + ": '" + v + "'");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string curve_path(const ExperimentConfig& cfg, const std::string& stem) {
  return (fs::path(cfg.out_dir) / (stem + ".csv")).string();
}

void prepare_out_dir(const ExperimentConfig& cfg,
                     std::vector<std::string>& written) {
  if (cfg.out_dir.empty())
    throw ConfigError("output directory path is empty");
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" +
                             cfg.out_dir + "': " + ec.message());
  std::string echo = (fs::path(cfg.out_dir) / "config.echo.ini").string();
  write_text_file(echo, cfg.serialize());
  written.push_back(echo);
}

void save_and_record(const DecayCurve& curve, const ExperimentConfig& cfg,
                     std::vector<std::string>& written) {
  std::string path = curve_path(cfg, curve.label);
  save_curve_csv(curve, path);
  written.push_back(path);
}

std::string fits_csv(const std::vector<std::pair<std::string, FitResult>>& rows) {
  std::string out = "label,method,slope,intercept,residual_norm\n";
  for (const auto& [label, fit] : rows) {
    out += label;
    out += fit.method == FitMethod::LogLinearLeastSquares
               ? ",log-linear-ls,"
               : ",single-exponential,";
    out += format_double(fit.slope);
    out += ',';
    out += format_double(fit.intercept);
    out += ',';
    out += format_double(fit.residual_norm);
    out += '\n';
  }
  return out;
}

ChannelFn analytic_channel(const DephasingModel& model) {
  return [model](const DensityMatrix& dm, double t) {
    return apply_dephasing(dm, model, t);
  };
}

ChannelFn mc_channel(const DephasingModel& model, long samples,
                     std::uint64_t seed) {
  return [model, samples, seed](const DensityMatrix& dm, double t) {
    return monte_carlo_dephasing(dm, model, t, samples, seed);
  };
}

}  // namespace

std::vector<double> DelayGrid::points() const {
  if (count < 1) throw ConfigError("delay grid needs at least one point");
  if (start < 0.0) throw ConfigError("delays must be nonnegative");
  if (stop < start) throw ConfigError("delay grid stop precedes start");
  if (log_spaced && start <= 0.0)
    throw ConfigError("log-spaced delay grid needs start > 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    double w = static_cast<double>(i) / (count - 1);
    out.push_back(log_spaced ? start * std::pow(stop / start, w)
                             : start + (stop - start) * w);
  }
  return out;
}

ExperimentConfig ExperimentConfig::alanine_defaults() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Alanine;
  cfg.model = DephasingModel::correlated(1.0);
  cfg.grid = {0.0, 2.0, 41, false};
  cfg.mode = RunMode::Corrected;
  cfg.out_dir = "out_alanine";
  return cfg;
}

ExperimentConfig ExperimentConfig::tce_defaults() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Tce;
  cfg.model = DephasingModel::independent(1.1, 0.6, 3.0);
  double t2_min = cfg.model.reference_time();
  cfg.grid = {0.01 * t2_min, 2.0 * t2_min, 9, true};
  cfg.mode = RunMode::Both;
  cfg.out_dir = "out_tce";
  return cfg;
}

void ExperimentConfig::validate() const {
  grid.points();
  if (slope_window < 3) throw ConfigError("slope window must be >= 3");
  if (mc_samples < 1) throw ConfigError("monte carlo sample count must be >= 1");
  if (out_dir.empty()) throw ConfigError("output directory path is empty");
  if (kind == ExperimentKind::Custom && circuit_file.empty())
    throw ConfigError("custom experiments need a circuit file");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "kind = " << kind_name(kind) << '\n';
  out << "mode = " << mode_name(mode) << '\n';
  out << "term_by_term = " << (term_by_term ? "true" : "false") << '\n';
  if (!circuit_file.empty()) out << "circuit = " << circuit_file << '\n';
  out << "\n[model]\n";
  if (model.kind == DephasingModel::Kind::Correlated) {
    out << "kind = correlated\n";
    out << "tau = " << format_double(model.tau) << '\n';
  } else {
    out << "kind = independent\n";
    out << "t2_spin1 = " << format_double(model.t2[0]) << '\n';
    out << "t2_spin2 = " << format_double(model.t2[1]) << '\n';
    out << "t2_spin3 = " << format_double(model.t2[2]) << '\n';
  }
  out << "\n[grid]\n";
  out << "start = " << format_double(grid.start) << '\n';
  out << "stop = " << format_double(grid.stop) << '\n';
  out << "count = " << grid.count << '\n';
  out << "spacing = " << (grid.log_spaced ? "log" : "linear") << '\n';
  out << "\n[monte_carlo]\n";
  out << "enabled = " << (monte_carlo ? "true" : "false") << '\n';
  out << "samples = " << mc_samples << '\n';
  out << "seed = " << seed << '\n';
  out << "\n[output]\n";
  out << "dir = " << out_dir << '\n';
  out << "slope_window = " << slope_window << '\n';
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  IniData ini = parse_ini(text);
  const std::string* kind_value = ini.find("experiment", "kind");
  if (!kind_value) throw ConfigError("missing [experiment] kind");

  ExperimentConfig cfg;
  if (*kind_value == "alanine")
    cfg = alanine_defaults();
  else if (*kind_value == "tce")
    cfg = tce_defaults();
  else if (*kind_value == "custom") {
    cfg = tce_defaults();
    cfg.kind = ExperimentKind::Custom;
    cfg.out_dir = "out_custom";
  } else
    throw ConfigError("unknown experiment kind '" + *kind_value + "'");

  static const std::map<std::string, std::vector<std::string>> known = {
      {"experiment", {"kind", "mode", "term_by_term", "circuit"}},
      {"model", {"kind", "tau", "t2_spin1", "t2_spin2", "t2_spin3"}},
      {"grid", {"start", "stop", "count", "spacing"}},
      {"monte_carlo", {"enabled", "samples", "seed"}},
      {"output", {"dir", "slope_window"}},
  };
  for (const auto& [section, keys] : ini.values) {
    auto it = known.find(section);
    if (it == known.end())
      throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (std::find(it->second.begin(), it->second.end(), key) ==
          it->second.end())
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }

  if (const auto* v = ini.find("experiment", "mode")) {
    if (*v == "decode")
      cfg.mode = RunMode::DecodeOnly;
    else if (*v == "correct")
      cfg.mode = RunMode::Corrected;
    else if (*v == "both")
      cfg.mode = RunMode::Both;
    else
      throw ConfigError("unknown mode '" + *v + "'");
  }
  if (const auto* v = ini.find("experiment", "term_by_term"))
    cfg.term_by_term = parse_bool(*v, "term_by_term");
  if (const auto* v = ini.find("experiment", "circuit")) cfg.circuit_file = *v;

  if (const auto* v = ini.find("model", "kind")) {
    if (*v == "correlated") {
      double tau = cfg.model.kind == DephasingModel::Kind::Correlated
                       ? cfg.model.tau
                       : 1.0;
      if (const auto* tv = ini.find("model", "tau"))
        tau = parse_number(*tv, "tau");
      cfg.model = DephasingModel::correlated(tau);
    } else if (*v == "independent") {
      std::array<double, 3> t2 = cfg.model.t2;
      if (const auto* t1 = ini.find("model", "t2_spin1"))
        t2[0] = parse_number(*t1, "t2_spin1");
      if (const auto* t1 = ini.find("model", "t2_spin2"))
        t2[1] = parse_number(*t1, "t2_spin2");
      if (const auto* t1 = ini.find("model", "t2_spin3"))
        t2[2] = parse_number(*t1, "t2_spin3");
      cfg.model = DephasingModel::independent(t2[0], t2[1], t2[2]);
    } else
      throw ConfigError("unknown model kind '" + *v + "'");
  } else {
    if (const auto* tv = ini.find("model", "tau"))
      cfg.model = DephasingModel::correlated(parse_number(*tv, "tau"));
  }

  if (const auto* v = ini.find("grid", "start"))
    cfg.grid.start = parse_number(*v, "grid start");
  if (const auto* v = ini.find("grid", "stop"))
    cfg.grid.stop = parse_number(*v, "grid stop");
  if (const auto* v = ini.find("grid", "count"))
    cfg.grid.count = static_cast<int>(parse_integer(*v, "grid count"));
  if (const auto* v = ini.find("grid", "spacing")) {
    if (*v == "linear")
      cfg.grid.log_spaced = false;
    else if (*v == "log")
      cfg.grid.log_spaced = true;
    else
      throw ConfigError("unknown grid spacing '" + *v + "'");
  }

  if (const auto* v = ini.find("monte_carlo", "enabled"))
    cfg.monte_carlo = parse_bool(*v, "monte_carlo enabled");
  if (const auto* v = ini.find("monte_carlo", "samples"))
    cfg.mc_samples = parse_integer(*v, "monte_carlo samples");
  if (const auto* v = ini.find("monte_carlo", "seed"))
    cfg.seed = static_cast<std::uint64_t>(
        parse_integer(*v, "monte_carlo seed"));

  if (const auto* v = ini.find("output", "dir")) cfg.out_dir = *v;
  if (const auto* v = ini.find("output", "slope_window"))
    cfg.slope_window = static_cast<int>(parse_integer(*v, "slope_window"));

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.serialize() == b.serialize();
}

const std::vector<std::string>& alanine_term_labels() {
  static const std::vector<std::string> labels = {
      "term_Iz1", "term_Iz1Iz2", "term_Iz1Iz3", "term_Iz1Iz2Iz3_single",
      "term_Iz1Iz2Iz3_triple"};
  return labels;
}

std::vector<TermWeight> alanine_weights() {
  // Coefficients of Iz1, Iz1Iz2, Iz1Iz3, Iz1Iz2Iz3 in the pseudopure
  // expansion; the three-spin operator splits into its coherence-order
  // parts, which recombine with unit weight each.
  const auto& labels = alanine_term_labels();
  return {{labels[0], 0.25},
          {labels[1], 0.5},
          {labels[2], 0.5},
          {labels[3], 1.0},
          {labels[4], 1.0}};
}

namespace {

// The four unit-coefficient product operators of the pseudopure expansion.
std::vector<ProductOperatorTerm> alanine_term_operators() {
  using enum SpinAxis;
  return {{{Z, Identity, Identity}, 1.0},
          {{Z, Z, Identity}, 1.0},
          {{Z, Identity, Z}, 1.0},
          {{Z, Z, Z}, 1.0}};
}

double iz_coefficient(const Matrix2& reduced) {
  // <Iz, reduced> / <Iz, Iz>.
  Matrix2 iz = single_spin_op(SpinAxis::Z);
  return (iz.adjoint() * reduced).trace().real() /
         (iz.adjoint() * iz).trace().real();
}

}  // namespace

AlanineResult run_alanine(const ExperimentConfig& cfg) {
  cfg.validate();
  AlanineResult result;
  prepare_out_dir(cfg, result.written_files);

  std::vector<double> delays = cfg.grid.points();
  int n = static_cast<int>(delays.size());
  Circuit encoder = encoder_circuit();
  ChannelFn channel = analytic_channel(cfg.model);
  result.weights = alanine_weights();

  // Per-term corrected contributions; the three-spin operator runs twice,
  // restricted to its single- and triple-quantum parts (gradient labeling).
  struct TermSpec {
    ProductOperatorTerm op;
    std::optional<std::vector<int>> keep_orders;
  };
  auto ops = alanine_term_operators();
  std::vector<TermSpec> specs = {{ops[0], std::nullopt},
                                 {ops[1], std::nullopt},
                                 {ops[2], std::nullopt},
                                 {ops[3], std::vector<int>{0, 1}},
                                 {ops[3], std::vector<int>{2, 3}}};

  if (cfg.term_by_term) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
      DensityMatrix piece{term_matrix(specs[k].op), Convention::Deviation};
      auto values = parallel_map(n, [&](int i) {
        PipelineConfig pipe{cfg.model, delays[static_cast<std::size_t>(i)],
                            true, InputAxis::Z};
        return iz_coefficient(run_pipeline_on_state(piece, pipe, encoder,
                                                    channel,
                                                    specs[k].keep_orders)
                                  .mat);
      });
      DecayCurve curve;
      curve.label = alanine_term_labels()[k];
      curve.delays = delays;
      curve.intensities = values;
      result.term_curves.push_back(curve);
    }
    result.recombined =
        recombine_pseudopure(result.term_curves, result.weights, "recombined");
  }

  // Direct full-matrix simulation of the corrected pipeline.
  auto full_values = parallel_map(n, [&](int i) {
    PipelineConfig pipe{cfg.model, delays[static_cast<std::size_t>(i)], true,
                        InputAxis::Z};
    return retained_polarization(InputAxis::Z, run_pipeline(pipe));
  });
  result.full_matrix.label = "full_matrix";
  result.full_matrix.delays = delays;
  result.full_matrix.intensities = full_values;

  if (cfg.monte_carlo) {
    auto mc_values = parallel_map(n, [&](int i) {
      PipelineConfig pipe{cfg.model, delays[static_cast<std::size_t>(i)], true,
                          InputAxis::Z};
      ChannelFn mc =
          mc_channel(cfg.model, cfg.mc_samples, point_seed(cfg.seed, i));
      return retained_polarization(InputAxis::Z,
                                   run_pipeline_with(pipe, encoder, mc));
    });
    DecayCurve mc_curve;
    mc_curve.label = "full_matrix_mc";
    mc_curve.delays = delays;
    mc_curve.intensities = mc_values;
    result.full_matrix_mc = mc_curve;
  }

  // Fits: single-exponential per term (amplitudes may be negative),
  // windowed log-linear slope on the recombined curve.
  std::vector<std::pair<std::string, FitResult>> fit_rows;
  if (cfg.term_by_term) {
    for (const auto& curve : result.term_curves) {
      FitResult fit = fit_single_exponential(curve);
      result.term_fits[curve.label] = fit;
      fit_rows.emplace_back(curve.label, fit);
    }
    result.recombined_slope = initial_slope(result.recombined, cfg.slope_window);
    fit_rows.emplace_back("recombined_initial", result.recombined_slope);

    for (std::size_t i = 0; i < result.recombined.size(); ++i)
      result.max_recombination_error = std::max(
          result.max_recombination_error,
          std::abs(result.recombined.intensities[i] -
                   result.full_matrix.intensities[i]));
  }

  // Artifacts.
  for (const auto& curve : result.term_curves)
    save_and_record(curve, cfg, result.written_files);
  if (cfg.term_by_term)
    save_and_record(result.recombined, cfg, result.written_files);
  save_and_record(result.full_matrix, cfg, result.written_files);
  if (result.full_matrix_mc)
    save_and_record(*result.full_matrix_mc, cfg, result.written_files);
  std::string fits_path = (fs::path(cfg.out_dir) / "fits.csv").string();
  write_text_file(fits_path, fits_csv(fit_rows));
  result.written_files.push_back(fits_path);

  std::vector<SvgSeries> series;
  static const std::vector<std::string> colors = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
  for (std::size_t k = 0; k < result.term_curves.size(); ++k)
    series.push_back({result.term_curves[k].label,
                      result.term_curves[k].delays,
                      result.term_curves[k].intensities, colors[k % 5], true});
  if (cfg.term_by_term)
    series.push_back({"recombined", result.recombined.delays,
                      result.recombined.intensities, "#000000", false});
  series.push_back({"full_matrix", result.full_matrix.delays,
                    result.full_matrix.intensities, "#7f7f7f", true});
  std::string plot_path = (fs::path(cfg.out_dir) / "alanine.svg").string();
  write_svg_plot(plot_path, "Per-term spin-1 intensities and recombination",
                 "dephasing delay", "intensity", series);
  result.written_files.push_back(plot_path);
  return result;
}

namespace {

TceModeCurves tce_mode_curves(const ExperimentConfig& cfg,
                              const std::vector<double>& delays,
                              const Circuit& encoder, bool corrected) {
  int n = static_cast<int>(delays.size());
  ChannelFn channel = analytic_channel(cfg.model);
  auto rows = parallel_map(n, [&](int i) {
    std::array<double, 3> f{};
    int k = 0;
    for (InputAxis axis : {InputAxis::X, InputAxis::Y, InputAxis::Z}) {
      PipelineConfig pipe{cfg.model, delays[static_cast<std::size_t>(i)],
                          corrected, axis};
      f[k++] = retained_polarization(axis,
                                     run_pipeline_with(pipe, encoder, channel));
    }
    return f;
  });
  TceModeCurves out;
  for (const auto& f : rows) {
    out.f_x.push_back(f[0]);
    out.f_y.push_back(f[1]);
    out.f_z.push_back(f[2]);
    out.f.push_back(entanglement_fidelity(f[0], f[1], f[2]));
  }
  return out;
}

DecayCurve fidelity_curve(const std::string& label,
                          const std::vector<double>& delays,
                          const TceModeCurves& curves) {
  DecayCurve c;
  c.label = label;
  c.delays = delays;
  c.intensities = curves.f;
  return c;
}

TceResult run_tce_like(const ExperimentConfig& cfg, const Circuit& encoder,
                       const std::string& plot_stem) {
  TceResult result;
  prepare_out_dir(cfg, result.written_files);
  result.delays = cfg.grid.points();

  bool want_decode = cfg.mode != RunMode::Corrected;
  bool want_corrected = cfg.mode != RunMode::DecodeOnly;
  if (want_decode)
    result.decode_only = tce_mode_curves(cfg, result.delays, encoder, false);
  if (want_corrected)
    result.corrected = tce_mode_curves(cfg, result.delays, encoder, true);

  if (cfg.monte_carlo && want_corrected) {
    int n = static_cast<int>(result.delays.size());
    auto values = parallel_map(n, [&](int i) {
      std::array<double, 3> f{};
      int k = 0;
      ChannelFn mc =
          mc_channel(cfg.model, cfg.mc_samples, point_seed(cfg.seed, i));
      for (InputAxis axis : {InputAxis::X, InputAxis::Y, InputAxis::Z}) {
        PipelineConfig pipe{cfg.model,
                            result.delays[static_cast<std::size_t>(i)], true,
                            axis};
        f[k++] = retained_polarization(axis,
                                       run_pipeline_with(pipe, encoder, mc));
      }
      return entanglement_fidelity(f[0], f[1], f[2]);
    });
    DecayCurve mc_curve;
    mc_curve.label = "fidelity_corrected_mc";
    mc_curve.delays = result.delays;
    mc_curve.intensities = values;
    result.corrected_mc = mc_curve;
  }

  // Combined table, one row per delay and mode.
  std::string table = "delay,mode,f_x,f_y,f_z,f\n";
  auto append_rows = [&](const TceModeCurves& c, const std::string& mode) {
    for (std::size_t i = 0; i < result.delays.size(); ++i) {
      table += format_double(result.delays[i]);
      table += ',' + mode + ',';
      table += format_double(c.f_x[i]);
      table += ',';
      table += format_double(c.f_y[i]);
      table += ',';
      table += format_double(c.f_z[i]);
      table += ',';
      table += format_double(c.f[i]);
      table += '\n';
    }
  };
  if (result.decode_only) append_rows(*result.decode_only, "decode");
  if (result.corrected) append_rows(*result.corrected, "correct");
  std::string table_path = (fs::path(cfg.out_dir) / "fidelities.csv").string();
  write_text_file(table_path, table);
  result.written_files.push_back(table_path);

  std::vector<std::pair<std::string, FitResult>> fit_rows;
  if (result.decode_only) {
    DecayCurve c = fidelity_curve("fidelity_decode", result.delays,
                                  *result.decode_only);
    save_and_record(c, cfg, result.written_files);
    result.slope_decode = initial_slope(c, cfg.slope_window);
    fit_rows.emplace_back(c.label, *result.slope_decode);
  }
  if (result.corrected) {
    DecayCurve c = fidelity_curve("fidelity_corrected", result.delays,
                                  *result.corrected);
    save_and_record(c, cfg, result.written_files);
    result.slope_corrected = initial_slope(c, cfg.slope_window);
    fit_rows.emplace_back(c.label, *result.slope_corrected);
  }
  if (result.corrected_mc)
    save_and_record(*result.corrected_mc, cfg, result.written_files);

  std::string slopes = "quantity,value\n";
  if (result.slope_decode)
    slopes += "initial_slope_decode," +
              format_double(result.slope_decode->slope) + '\n';
  if (result.slope_corrected)
    slopes += "initial_slope_corrected," +
              format_double(result.slope_corrected->slope) + '\n';
  if (result.slope_decode && result.slope_corrected &&
      result.slope_corrected->slope != 0.0) {
    result.slope_ratio =
        result.slope_decode->slope / result.slope_corrected->slope;
    slopes += "slope_ratio_decode_over_corrected," +
              format_double(*result.slope_ratio) + '\n';
  }
  std::string slopes_path = (fs::path(cfg.out_dir) / "slopes.csv").string();
  write_text_file(slopes_path, slopes);
  result.written_files.push_back(slopes_path);

  std::vector<SvgSeries> series;
  if (result.decode_only)
    series.push_back({"decode only", result.delays, result.decode_only->f,
                      "#d62728", false});
  if (result.corrected)
    series.push_back({"decode + correct", result.delays, result.corrected->f,
                      "#2ca02c", false});
  if (result.corrected_mc)
    series.push_back({"decode + correct (MC)", result.delays,
                      result.corrected_mc->intensities, "#2ca02c", true});
  std::string plot_path =
      (fs::path(cfg.out_dir) / (plot_stem + ".svg")).string();
  write_svg_plot(plot_path, "Entanglement fidelity vs delay", "delay (s)",
                 "entanglement fidelity", series);
  result.written_files.push_back(plot_path);
  return result;
}

}  // namespace

TceResult run_tce(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_tce_like(cfg, encoder_circuit(), "tce");
}

TceResult run_custom(const ExperimentConfig& cfg) {
  cfg.validate();
  std::ifstream in(cfg.circuit_file);
  if (!in)
    throw ConfigError("cannot open circuit file: " + cfg.circuit_file);
  std::ostringstream buf;
  buf << in.rdbuf();
  Circuit encoder = parse_circuit(buf.str());
  return run_tce_like(cfg, encoder, "custom");
}

}  // namespace nmrqec
