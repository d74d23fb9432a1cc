#pragma once

#include <functional>
#include <optional>

#include "nmrqec/channels.hpp"
#include "nmrqec/circuits.hpp"
#include "nmrqec/qstate.hpp"

// End-to-end pipeline of the phase code: prepare a pseudopure input, encode,
// dephase for a delay, decode, optionally apply the Toffoli correction, and
// reduce to spin 1. Plus the polarization / entanglement-fidelity metrics
// and the closed-form corrected decay law used as a golden reference.

namespace nmrqec {

enum class InputAxis : std::uint8_t { Unit, X, Y, Z };

struct PipelineConfig {
  DephasingModel model;
  double delay = 0.0;
  bool with_correction = true;
  InputAxis input_axis = InputAxis::Z;
};

// The 2x2 deviation (or unit) state selected by an input axis:
// 1/2 1, Ix, Iy or Iz.
Matrix2 input_state(InputAxis axis);

// Channel plugged into the pipeline in place of the analytic map, e.g. the
// Monte Carlo oracle. Receives the encoded state and the delay.
using ChannelFn =
    std::function<DensityMatrix(const DensityMatrix&, double)>;

ReducedState run_pipeline(const PipelineConfig& cfg);

// Same pipeline with a custom encoder (decoder is its formal inverse) and a
// custom channel. Used by the Monte Carlo cross-checks and the CLI's custom
// networks.
ReducedState run_pipeline_with(const PipelineConfig& cfg,
                               const Circuit& encoder,
                               const ChannelFn& channel);

// Full pipeline on an arbitrary prepared 8x8 state; the building block for
// term-by-term runs. Optionally restricts the encoded state to the listed
// absolute coherence orders before the delay (gradient labeling).
ReducedState run_pipeline_on_state(
    const DensityMatrix& prepared, const PipelineConfig& cfg,
    const Circuit& encoder, const ChannelFn& channel,
    const std::optional<std::vector<int>>& keep_orders = std::nullopt);

// Relative polarization of I_a retained in a 2x2 output, normalized so that
// identity processing of the matching input axis gives 1.
double retained_polarization(InputAxis axis, const ReducedState& output);

// f = 1/4 (1 + f_x + f_y + f_z).
double entanglement_fidelity(double f_x, double f_y, double f_z);

// Corrected decay of an Iz input under the correlated model:
// (9 exp(-t/tau) - exp(-9 t/tau)) / 8. Quadratic near t = 0.
double analytic_corrected_z(double t, double tau);

// Trace distance of two spin states, (1/2) tr |a - b|.
double trace_distance(const Matrix2& a, const Matrix2& b);

}  // namespace nmrqec
