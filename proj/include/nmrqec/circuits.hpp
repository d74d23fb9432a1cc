#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nmrqec/qstate.hpp"

// Ideal gates (rotations, CNOT, Toffoli) on three named spins and the
// encode / decode / correct network of the three-spin phase code. Gates are
// applied by exact conjugation on 8x8 density matrices; all noise lives in
// the channels module.

namespace nmrqec {

enum class GateKind : std::uint8_t { RotX, RotY, RotZ, Cnot, Toffoli };

// Spins are numbered 1..3, matching the circuit text format.
struct Gate {
  GateKind kind;
  double angle_deg = 0.0;  // rotations only
  int target = 1;
  int control_a = 0;  // CNOT and Toffoli
  int control_b = 0;  // Toffoli only

  static Gate rot_x(double angle_deg, int spin);
  static Gate rot_y(double angle_deg, int spin);
  static Gate rot_z(double angle_deg, int spin);
  static Gate cnot(int control, int target);
  static Gate toffoli(int control_a, int control_b, int target);
};

struct Circuit {
  std::vector<Gate> gates;
  static constexpr int spin_count = kSpins;
};

struct CircuitParseError : std::runtime_error {
  int line;
  CircuitParseError(int line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
};

Matrix8 gate_unitary(const Gate& g);

// Ordered product of the gate unitaries, first gate rightmost.
Matrix8 circuit_unitary(const Circuit& c);

// Formal inverse: gates reversed, rotation angles negated.
Circuit inverse(const Circuit& c);

// U rho U^dagger.
DensityMatrix apply_circuit(const DensityMatrix& dm, const Circuit& c);

// Encoder for the phase code: alpha|000> + beta|100> goes to
// alpha|+++> + beta|--->. Gate list: RZ(180) on spin 1 (fixes the relative
// branch phase left by the y-rotations), CNOT 1->2, CNOT 1->3, RY(90) on
// every spin.
Circuit encoder_circuit();

// Exact inverse of encoder_circuit.
Circuit decoder_circuit();

// Toffoli with controls on spins 2,3 and target spin 1. After decoding, the
// syndrome |11> on the ancillas flags a spin-1 phase error; the controlled
// flip restores spin 1 without disturbing the other syndrome branches.
Circuit correction_circuit();

// One gate per line: "RX <angle> <spin>", "RY <angle> <spin>",
// "RZ <angle> <spin>", "CNOT <control> <target>",
// "TOFFOLI <control> <control> <target>". '#' starts a comment.
Circuit parse_circuit(std::string_view text);

std::string format_circuit(const Circuit& c);

}  // namespace nmrqec
