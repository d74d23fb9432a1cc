#include "nmrqec/circuits.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nmrqec {

namespace {

const Complex kI(0.0, 1.0);

void check_spin(int spin, const char* what) {
  if (spin < 1 || spin > kSpins)
    throw std::invalid_argument(std::string(what) + " spin out of range 1..3");
}

// Basis index bit for a 1-based spin label; spin 1 is most significant.
int spin_bit(int spin) { return 1 << (kSpins - spin); }

Matrix2 rotation_2x2(GateKind kind, double angle_deg) {
  double half = 0.5 * angle_deg * std::numbers::pi / 180.0;
  Matrix2 axis;
  switch (kind) {
    case GateKind::RotX:
      axis << 0, 1, 1, 0;
      break;
    case GateKind::RotY:
      axis << 0, -kI, kI, 0;
      break;
    default:
      axis << 1, 0, 0, -1;
      break;
  }
  return std::cos(half) * Matrix2::Identity() - kI * std::sin(half) * axis;
}

}  // namespace

Gate Gate::rot_x(double angle_deg, int spin) {
  check_spin(spin, "rotation");
  return {GateKind::RotX, angle_deg, spin, 0, 0};
}

Gate Gate::rot_y(double angle_deg, int spin) {
  check_spin(spin, "rotation");
  return {GateKind::RotY, angle_deg, spin, 0, 0};
}

Gate Gate::rot_z(double angle_deg, int spin) {
  check_spin(spin, "rotation");
  return {GateKind::RotZ, angle_deg, spin, 0, 0};
}

Gate Gate::cnot(int control, int target) {
  check_spin(control, "CNOT control");
  check_spin(target, "CNOT target");
  if (control == target)
    throw std::invalid_argument("CNOT control equals target");
  return {GateKind::Cnot, 0.0, target, control, 0};
}

Gate Gate::toffoli(int control_a, int control_b, int target) {
  check_spin(control_a, "Toffoli control");
  check_spin(control_b, "Toffoli control");
  check_spin(target, "Toffoli target");
  if (control_a == control_b || control_a == target || control_b == target)
    throw std::invalid_argument("Toffoli spins must be distinct");
  return {GateKind::Toffoli, 0.0, target, control_a, control_b};
}

Matrix8 gate_unitary(const Gate& g) {
  Matrix8 u = Matrix8::Zero();
  switch (g.kind) {
    case GateKind::RotX:
    case GateKind::RotY:
    case GateKind::RotZ: {
      Matrix2 r = rotation_2x2(g.kind, g.angle_deg);
      int tb = spin_bit(g.target);
      for (int b = 0; b < kDim; ++b) {
        int b0 = b & ~tb;
        int bit = (b & tb) ? 1 : 0;
        u(b0, b) += r(0, bit);
        u(b0 | tb, b) += r(1, bit);
      }
      break;
    }
    case GateKind::Cnot: {
      int cb = spin_bit(g.control_a);
      int tb = spin_bit(g.target);
      for (int b = 0; b < kDim; ++b) u((b & cb) ? (b ^ tb) : b, b) = 1.0;
      break;
    }
    case GateKind::Toffoli: {
      int ca = spin_bit(g.control_a);
      int cb = spin_bit(g.control_b);
      int tb = spin_bit(g.target);
      for (int b = 0; b < kDim; ++b)
        u(((b & ca) && (b & cb)) ? (b ^ tb) : b, b) = 1.0;
      break;
    }
  }
  return u;
}

Matrix8 circuit_unitary(const Circuit& c) {
  Matrix8 u = Matrix8::Identity();
  for (const Gate& g : c.gates) u = gate_unitary(g) * u;
  return u;
}

Circuit inverse(const Circuit& c) {
  Circuit inv;
  inv.gates.reserve(c.gates.size());
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    Gate g = *it;
    if (g.kind == GateKind::RotX || g.kind == GateKind::RotY ||
        g.kind == GateKind::RotZ)
      g.angle_deg = -g.angle_deg;
    inv.gates.push_back(g);
  }
  return inv;
}

DensityMatrix apply_circuit(const DensityMatrix& dm, const Circuit& c) {
  Matrix8 u = circuit_unitary(c);
  return {u * dm.mat * u.adjoint(), dm.convention};
}

Circuit encoder_circuit() {
  Circuit c;
  c.gates = {Gate::rot_z(180.0, 1), Gate::cnot(1, 2), Gate::cnot(1, 3),
             Gate::rot_y(90.0, 1),  Gate::rot_y(90.0, 2),
             Gate::rot_y(90.0, 3)};
  return c;
}

Circuit decoder_circuit() { return inverse(encoder_circuit()); }

Circuit correction_circuit() {
  Circuit c;
  c.gates = {Gate::toffoli(2, 3, 1)};
  return c;
}

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;  // blank or comment-only line
    for (char& ch : name) ch = static_cast<char>(std::toupper(ch));
    try {
      auto read_int = [&fields]() {
        int v;
        if (!(fields >> v)) throw std::invalid_argument("missing spin index");
        return v;
      };
      auto read_angle = [&fields]() {
        double v;
        if (!(fields >> v)) throw std::invalid_argument("missing angle");
        return v;
      };
      if (name == "RX") {
        double a = read_angle();
        c.gates.push_back(Gate::rot_x(a, read_int()));
      } else if (name == "RY") {
        double a = read_angle();
        c.gates.push_back(Gate::rot_y(a, read_int()));
      } else if (name == "RZ") {
        double a = read_angle();
        c.gates.push_back(Gate::rot_z(a, read_int()));
      } else if (name == "CNOT") {
        int ctrl = read_int();
        c.gates.push_back(Gate::cnot(ctrl, read_int()));
      } else if (name == "TOFFOLI") {
        int ca = read_int();
        int cb = read_int();
        c.gates.push_back(Gate::toffoli(ca, cb, read_int()));
      } else {
        throw std::invalid_argument("unknown gate '" + name + "'");
      }
      std::string extra;
      if (fields >> extra)
        throw std::invalid_argument("trailing token '" + extra + "'");
    } catch (const std::invalid_argument& e) {
      throw CircuitParseError(line_number, e.what());
    }
  }
  return c;
}

std::string format_circuit(const Circuit& c) {
  std::ostringstream out;
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::RotX:
        out << "RX " << g.angle_deg << ' ' << g.target << '\n';
        break;
      case GateKind::RotY:
        out << "RY " << g.angle_deg << ' ' << g.target << '\n';
        break;
      case GateKind::RotZ:
        out << "RZ " << g.angle_deg << ' ' << g.target << '\n';
        break;
      case GateKind::Cnot:
        out << "CNOT " << g.control_a << ' ' << g.target << '\n';
        break;
      case GateKind::Toffoli:
        out << "TOFFOLI " << g.control_a << ' ' << g.control_b << ' '
            << g.target << '\n';
        break;
    }
  }
  return out.str();
}

}  // namespace nmrqec
