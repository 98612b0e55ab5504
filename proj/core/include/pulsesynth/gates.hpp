#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pulsesynth/linalg.hpp"
#include "pulsesynth/spin_system.hpp"

namespace pulsesynth {

class GateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How a target's global phase enters the fidelity. `fixed_phase` chases the
/// representative e^{i phi} U_G; `projective` ignores global phase.
struct PhaseMode {
  enum class Kind { FixedPhase, Projective };
  Kind kind = Kind::Projective;
  double phase = 0.0;

  static PhaseMode fixed(double phi) { return {Kind::FixedPhase, phi}; }
  static PhaseMode projective() { return {Kind::Projective, 0.0}; }
  bool is_projective() const { return kind == Kind::Projective; }
};

struct TargetGate {
  std::string name;
  int n = 0;
  Matrix matrix;
  PhaseMode phase_mode = PhaseMode::projective();

  Eigen::Index dim() const { return matrix.rows(); }

  /// The matrix the su functional compares against: e^{i phi} U_G for a
  /// fixed phase, U_G otherwise.
  Matrix phased_matrix() const;

  TargetGate with_phase_mode(PhaseMode mode) const;
};

/// Unitarity tolerance every constructed target satisfies.
inline constexpr double kGateUnitarityTolerance = 1e-12;

TargetGate identity_gate(int n);

/// DFT matrix, entry [j,k] = e^{-2 pi i jk / N} / sqrt(N). No output
/// bit-reversal. The negative exponent gives det qft(3) = -i, so the
/// smallest phase taking it into SU(8) is pi/16.
TargetGate qft(int n);

/// Qubits 0..n-2 control a NOT on qubit n-1; swaps |1..10> and |1..11>.
TargetGate cn_not(int n);

TargetGate swap_gate(int a, int b, int n);
TargetGate hadamard(int q, int n);
TargetGate controlled_phase(double theta, int a, int b, int n);
TargetGate cnot(int control, int target, int n);

/// exp(-i theta Z_a Z_b).
TargetGate ising_zz(double theta, int a, int b, int n);

/// exp(-i pi J t (1/2) Z (x) Z (x) Z) on three qubits.
TargetGate trilinear_zzz(double t, double J = 1.0);

/// Parses `qft`, `cn_not`, `toffoli`, `identity`, `swap(a,b)`,
/// `hadamard(q)`, `cnot(c,t)`, `controlled_phase(theta,a,b)`,
/// `zz(theta,a,b)`, `trilinear_zzz(t[,J])`; n is the system size.
TargetGate parse_gate(std::string_view spec, int n);

/// Global-phase family: phases phi with det(e^{i phi} U_G) = 1.
struct PhaseFamily {
  double phi0 = 0.0;
  std::vector<double> phases;  // phi0 + 2 pi p / N, p = 0..N-1
};

PhaseFamily phase_family(const TargetGate& gate);
PhaseFamily phase_family(const Matrix& u);

// ---------------------------------------------------------------------------
// Standard-decomposition baselines (times in units of 1/J).

enum class GateFamily { Qft, CnNot };
enum class BaselineSource { SaitoLn, BlaisLn, BlaisSpecial5, BarencoKn, FormulaKn };

std::string_view to_string(GateFamily family);
std::string_view to_string(BaselineSource source);
GateFamily parse_gate_family(std::string_view text);

class BaselineMissing : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Throws BaselineMissing when (family, source, n) is not tabulated.
double baseline_time(GateFamily family, BaselineSource source, int n);

/// Baseline sources that apply to a family on a topology kind.
std::vector<BaselineSource> baseline_sources(GateFamily family, TopologyKind topology);

/// Published optimal-control times for QFT on L_n and C^{n-1}NOT on K_n.
std::optional<double> published_best_time(GateFamily family, int n);

}  // namespace pulsesynth
