#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nmrqec/experiment.hpp"

// Batch front-end. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.

namespace {

using namespace nmrqec;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::uint64_t seed = 0;
  long samples = 0;
  int slope_window = 0;
  bool monte_carlo = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "configuration file (INI)");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--seed", opt.seed, "Monte Carlo seed");
  cmd->add_option("--samples", opt.samples, "Monte Carlo sample count");
  cmd->add_option("--mode", opt.mode, "decode | correct | both");
  cmd->add_option("--slope-window", opt.slope_window,
                  "points in the initial-slope fit window");
  cmd->add_flag("--monte-carlo", opt.monte_carlo,
                "also run the Monte Carlo channel as an oracle curve");
}

ExperimentConfig resolve_config(const CLI::App* cmd, const CommonOptions& opt,
                                ExperimentKind kind) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = ExperimentConfig::load(opt.config_path);
    if (cfg.kind != kind)
      throw ConfigError("config file is for a different experiment kind");
  } else {
    cfg = kind == ExperimentKind::Alanine ? ExperimentConfig::alanine_defaults()
                                          : ExperimentConfig::tce_defaults();
    if (kind == ExperimentKind::Custom) {
      cfg.kind = ExperimentKind::Custom;
      cfg.out_dir = "out_custom";
    }
  }
  if (cmd->count("--out")) cfg.out_dir = opt.out_dir;
  if (cmd->count("--seed")) cfg.seed = opt.seed;
  if (cmd->count("--samples")) cfg.mc_samples = opt.samples;
  if (cmd->count("--slope-window")) cfg.slope_window = opt.slope_window;
  if (cmd->count("--monte-carlo")) cfg.monte_carlo = true;
  if (cmd->count("--mode")) {
    if (opt.mode == "decode")
      cfg.mode = RunMode::DecodeOnly;
    else if (opt.mode == "correct")
      cfg.mode = RunMode::Corrected;
    else if (opt.mode == "both")
      cfg.mode = RunMode::Both;
    else
      throw ConfigError("unknown mode '" + opt.mode + "'");
  }
  return cfg;
}

void print_files(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

void print_fit(const std::string& label, const FitResult& fit) {
  std::printf("%s: slope %.6g intercept %.6g residual %.3g\n", label.c_str(),
              fit.slope, fit.intercept, fit.residual_norm);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact density-matrix simulator for the three-spin phase-error "
      "correcting code"};
  app.require_subcommand(1);

  CommonOptions alanine_opt, tce_opt, custom_opt;
  CLI::App* alanine_cmd = app.add_subcommand(
      "alanine", "per-term decay curves and their pseudopure recombination");
  add_common(alanine_cmd, alanine_opt);

  CLI::App* tce_cmd = app.add_subcommand(
      "tce", "entanglement-fidelity curves for the four-input protocol");
  add_common(tce_cmd, tce_opt);

  CLI::App* custom_cmd = app.add_subcommand(
      "custom", "run the fidelity campaign with a user-supplied network");
  add_common(custom_cmd, custom_opt);
  std::string circuit_file;
  custom_cmd->add_option("circuit", circuit_file,
                         "circuit text file replacing the built-in encoder");

  CLI::App* fit_cmd =
      app.add_subcommand("fit", "fit a standalone decay-curve CSV");
  std::string fit_path, fit_method = "log";
  int fit_window = 0;
  fit_cmd->add_option("csv", fit_path, "curve file (delay,intensity[,sigma])")
      ->required();
  fit_cmd->add_option("--method", fit_method, "log | exp");
  fit_cmd->add_option("--slope-window", fit_window,
                      "fit only the first N points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*alanine_cmd) {
      ExperimentConfig cfg =
          resolve_config(alanine_cmd, alanine_opt, ExperimentKind::Alanine);
      AlanineResult result = run_alanine(cfg);
      print_files(result.written_files);
      for (const auto& [label, fit] : result.term_fits) print_fit(label, fit);
      if (cfg.term_by_term) {
        print_fit("recombined_initial", result.recombined_slope);
        std::printf("max |recombined - full_matrix| = %.3g\n",
                    result.max_recombination_error);
      }
    } else if (*tce_cmd || *custom_cmd) {
      bool is_custom = static_cast<bool>(*custom_cmd);
      const CLI::App* cmd = is_custom ? custom_cmd : tce_cmd;
      CommonOptions& opt = is_custom ? custom_opt : tce_opt;
      ExperimentConfig cfg = resolve_config(
          cmd, opt, is_custom ? ExperimentKind::Custom : ExperimentKind::Tce);
      if (is_custom && !circuit_file.empty()) cfg.circuit_file = circuit_file;
      TceResult result = is_custom ? run_custom(cfg) : run_tce(cfg);
      print_files(result.written_files);
      if (result.slope_decode)
        print_fit("fidelity_decode", *result.slope_decode);
      if (result.slope_corrected)
        print_fit("fidelity_corrected", *result.slope_corrected);
      if (result.slope_ratio)
        std::printf("slope ratio (decode / corrected) = %.6g\n",
                    *result.slope_ratio);
    } else if (*fit_cmd) {
      DecayCurve curve = load_curve_csv(fit_path);
      FitResult fit;
      if (fit_cmd->count("--slope-window")) {
        fit = initial_slope(curve, fit_window);
      } else if (fit_method == "log") {
        fit = fit_log_linear(curve);
      } else if (fit_method == "exp") {
        fit = fit_single_exponential(curve);
      } else {
        throw ConfigError("unknown fit method '" + fit_method + "'");
      }
      print_fit(curve.label, fit);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const CircuitParseError& e) {
    std::cerr << "circuit error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
