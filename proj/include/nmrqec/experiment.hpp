#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nmrqec/analysis.hpp"
#include "nmrqec/qec.hpp"

// Batch experiment layer: configuration files, the alanine and TCE campaign
// runners, and their CSV / SVG artifacts. Runners return their results and
// write the artifact files; identical configurations (including seeds)
// produce byte-identical CSV output.

namespace nmrqec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind : std::uint8_t { Alanine, Tce, Custom };
enum class RunMode : std::uint8_t { DecodeOnly, Corrected, Both };

struct DelayGrid {
  double start = 0.0;
  double stop = 1.0;
  int count = 9;
  bool log_spaced = false;

  std::vector<double> points() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Tce;
  DephasingModel model = DephasingModel::independent(1.1, 0.6, 3.0);
  DelayGrid grid;
  RunMode mode = RunMode::Both;
  bool term_by_term = true;
  bool monte_carlo = false;
  long mc_samples = 100000;
  std::uint64_t seed = 1;
  int slope_window = 4;
  std::string out_dir = "out";
  std::string circuit_file;  // custom experiments only

  // Paper-flavored defaults: correlated scrambling with tau = 1 s on a
  // linear grid for alanine; the three measured T2's on nine log-spaced
  // delays for TCE.
  static ExperimentConfig alanine_defaults();
  static ExperimentConfig tce_defaults();

  // Structured text with named sections; lossless round trip.
  std::string serialize() const;
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  void validate() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

struct AlanineResult {
  std::vector<DecayCurve> term_curves;  // five labeled per-term curves
  std::vector<TermWeight> weights;      // recombination weights used
  DecayCurve recombined;
  DecayCurve full_matrix;   // direct full-density-matrix simulation
  std::optional<DecayCurve> full_matrix_mc;
  std::map<std::string, FitResult> term_fits;  // single-exponential
  FitResult recombined_slope;                  // windowed log-linear
  double max_recombination_error = 0.0;  // |recombined - full_matrix|
  std::vector<std::string> written_files;
};

struct TceModeCurves {
  std::vector<double> f_x, f_y, f_z, f;
};

struct TceResult {
  std::vector<double> delays;
  std::optional<TceModeCurves> decode_only;
  std::optional<TceModeCurves> corrected;
  std::optional<DecayCurve> corrected_mc;
  std::optional<FitResult> slope_decode;
  std::optional<FitResult> slope_corrected;
  std::optional<double> slope_ratio;  // decode-only over corrected
  std::vector<std::string> written_files;
};

AlanineResult run_alanine(const ExperimentConfig& cfg);
TceResult run_tce(const ExperimentConfig& cfg);
// Same campaign as run_tce with the encoder replaced by the circuit from
// cfg.circuit_file (decoder is its formal inverse).
TceResult run_custom(const ExperimentConfig& cfg);

// Labels of the five alanine term curves, in emission order.
const std::vector<std::string>& alanine_term_labels();
// The Eq.-6-style recombination weights matching alanine_term_labels().
std::vector<TermWeight> alanine_weights();

}  // namespace nmrqec
