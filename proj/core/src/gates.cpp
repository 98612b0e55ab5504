#include "pulsesynth/gates.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace pulsesynth {

namespace {

constexpr double kPi = std::numbers::pi;

void require_qubits(int n, int minimum, const char* what) {
  if (n < minimum || n > 12) {
    throw GateError(std::string(what) + ": unsupported qubit count " + std::to_string(n));
  }
}

void require_index(int q, int n, const char* what) {
  if (q < 0 || q >= n) {
    throw GateError(std::string(what) + ": qubit index " + std::to_string(q) +
                    " out of range for " + std::to_string(n) + " qubits");
  }
}

void require_distinct(int a, int b, const char* what) {
  if (a == b) {
    throw GateError(std::string(what) + ": qubit indices must differ");
  }
}

TargetGate make(std::string name, int n, Matrix m) {
  TargetGate g{std::move(name), n, std::move(m), PhaseMode::projective()};
  if (unitarity_error(g.matrix) > kGateUnitarityTolerance) {
    throw GateError("gate '" + g.name + "' is not unitary");
  }
  return g;
}

Matrix two_qubit_embed(const Matrix& op, int a, int b, int n) {
  const std::array<int, 2> where{a, b};
  return embed(op, where, n);
}

}  // namespace

Matrix TargetGate::phased_matrix() const {
  if (phase_mode.kind == PhaseMode::Kind::FixedPhase) {
    return std::polar(1.0, phase_mode.phase) * matrix;
  }
  return matrix;
}

TargetGate TargetGate::with_phase_mode(PhaseMode mode) const {
  TargetGate g = *this;
  g.phase_mode = mode;
  return g;
}

TargetGate identity_gate(int n) {
  require_qubits(n, 1, "identity");
  return make("identity", n, identity(Eigen::Index{1} << n));
}

TargetGate qft(int n) {
  require_qubits(n, 1, "qft");
  const Eigen::Index dim = Eigen::Index{1} << n;
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      // Reduce jk mod N before scaling so large products keep full precision.
      const auto e = static_cast<double>((j * k) % dim);
      m(j, k) = std::polar(norm, -2.0 * kPi * e / static_cast<double>(dim));
    }
  }
  return make("qft", n, std::move(m));
}

TargetGate cn_not(int n) {
  require_qubits(n, 2, "cn_not");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix m = identity(dim);
  m(dim - 2, dim - 2) = 0.0;
  m(dim - 1, dim - 1) = 0.0;
  m(dim - 2, dim - 1) = 1.0;
  m(dim - 1, dim - 2) = 1.0;
  return make("cn_not", n, std::move(m));
}

TargetGate swap_gate(int a, int b, int n) {
  require_qubits(n, 2, "swap");
  require_index(a, n, "swap");
  require_index(b, n, "swap");
  require_distinct(a, b, "swap");
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
  return make("swap(" + std::to_string(a) + "," + std::to_string(b) + ")", n,
              two_qubit_embed(s, a, b, n));
}

TargetGate hadamard(int q, int n) {
  require_qubits(n, 1, "hadamard");
  require_index(q, n, "hadamard");
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::sqrt(2.0);
  const std::array<int, 1> where{q};
  return make("hadamard(" + std::to_string(q) + ")", n, embed(h, where, n));
}

TargetGate controlled_phase(double theta, int a, int b, int n) {
  require_qubits(n, 2, "controlled_phase");
  require_index(a, n, "controlled_phase");
  require_index(b, n, "controlled_phase");
  require_distinct(a, b, "controlled_phase");
  Matrix c = identity(4);
  c(3, 3) = std::polar(1.0, theta);
  return make("controlled_phase(" + std::to_string(theta) + "," + std::to_string(a) + "," +
                  std::to_string(b) + ")",
              n, two_qubit_embed(c, a, b, n));
}

TargetGate cnot(int control, int target, int n) {
  require_qubits(n, 2, "cnot");
  require_index(control, n, "cnot");
  require_index(target, n, "cnot");
  require_distinct(control, target, "cnot");
  Matrix c = identity(4);
  c(2, 2) = c(3, 3) = 0.0;
  c(2, 3) = c(3, 2) = 1.0;
  return make("cnot(" + std::to_string(control) + "," + std::to_string(target) + ")", n,
              two_qubit_embed(c, control, target, n));
}

TargetGate ising_zz(double theta, int a, int b, int n) {
  require_qubits(n, 2, "zz");
  require_index(a, n, "zz");
  require_index(b, n, "zz");
  require_distinct(a, b, "zz");
  Matrix d = Matrix::Zero(4, 4);
  d(0, 0) = d(3, 3) = std::polar(1.0, -theta);
  d(1, 1) = d(2, 2) = std::polar(1.0, theta);
  return make("zz(" + std::to_string(theta) + "," + std::to_string(a) + "," +
                  std::to_string(b) + ")",
              n, two_qubit_embed(d, a, b, n));
}

TargetGate trilinear_zzz(double t, double J) {
  Matrix m = Matrix::Zero(8, 8);
  for (Eigen::Index s = 0; s < 8; ++s) {
    const int parity = static_cast<int>(((s >> 2) ^ (s >> 1) ^ s) & 1);
    const double eigen = parity ? -0.5 : 0.5;
    m(s, s) = std::polar(1.0, -kPi * J * t * eigen);
  }
  return make("trilinear_zzz(" + std::to_string(t) + "," + std::to_string(J) + ")", 3,
              std::move(m));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<double> parse_args(std::string_view body, std::string_view spec) {
  std::vector<double> args;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view tok = trim(body.substr(0, comma));
    double v = 0.0;
    // libstdc++ 11 provides floating-point from_chars.
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw GateError("malformed argument in gate spec '" + std::string(spec) + "'");
    }
    args.push_back(v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return args;
}

int as_index(double v, std::string_view spec) {
  if (v != std::floor(v)) {
    throw GateError("non-integer qubit index in '" + std::string(spec) + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

TargetGate parse_gate(std::string_view spec, int n) {
  const std::string_view text = trim(spec);
  std::string_view name = text;
  std::vector<double> args;
  if (const auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') {
      throw GateError("unbalanced parentheses in gate spec '" + std::string(spec) + "'");
    }
    name = trim(text.substr(0, open));
    args = parse_args(text.substr(open + 1, text.size() - open - 2), spec);
  }

  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw GateError("wrong number of arguments for gate '" + std::string(name) + "'");
    }
  };

  if (name == "qft") {
    expect(0, 0);
    return qft(n);
  }
  if (name == "cn_not" || name == "cnnot") {
    expect(0, 0);
    return cn_not(n);
  }
  if (name == "toffoli") {
    expect(0, 0);
    if (n != 3) throw GateError("toffoli needs n = 3");
    return cn_not(3);
  }
  if (name == "identity") {
    expect(0, 0);
    return identity_gate(n);
  }
  if (name == "swap") {
    expect(2, 2);
    return swap_gate(as_index(args[0], spec), as_index(args[1], spec), n);
  }
  if (name == "hadamard") {
    expect(1, 1);
    return hadamard(as_index(args[0], spec), n);
  }
  if (name == "cnot") {
    if (args.empty()) return cnot(0, 1, n);
    expect(2, 2);
    return cnot(as_index(args[0], spec), as_index(args[1], spec), n);
  }
  if (name == "controlled_phase" || name == "cphase") {
    expect(3, 3);
    return controlled_phase(args[0], as_index(args[1], spec), as_index(args[2], spec), n);
  }
  if (name == "zz") {
    expect(3, 3);
    return ising_zz(args[0], as_index(args[1], spec), as_index(args[2], spec), n);
  }
  if (name == "trilinear_zzz" || name == "zzz") {
    expect(1, 2);
    if (n != 3) throw GateError("trilinear_zzz needs n = 3");
    return trilinear_zzz(args[0], args.size() > 1 ? args[1] : 1.0);
  }
  throw GateError("unknown gate '" + std::string(name) + "'");
}

PhaseFamily phase_family(const Matrix& u) {
  const auto dim = static_cast<double>(u.rows());
  const Complex det = u.determinant();
  // det(e^{i phi} U) = e^{i N phi} det U = 1  <=>  N phi = -arg det (mod 2 pi).
  double phi0 = std::fmod(-std::arg(det), 2.0 * kPi);
  if (phi0 < 0.0) phi0 += 2.0 * kPi;
  phi0 /= dim;
  const double spacing = 2.0 * kPi / dim;
  if (spacing - phi0 < 1e-12) phi0 = 0.0;  // arg det = -0 wrapped to 2 pi

  PhaseFamily family;
  family.phi0 = phi0;
  family.phases.reserve(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index p = 0; p < u.rows(); ++p) {
    family.phases.push_back(phi0 + spacing * static_cast<double>(p));
  }
  return family;
}

PhaseFamily phase_family(const TargetGate& gate) { return phase_family(gate.matrix); }

std::string_view to_string(GateFamily family) {
  return family == GateFamily::Qft ? "qft" : "cn_not";
}

std::string_view to_string(BaselineSource source) {
  switch (source) {
    case BaselineSource::SaitoLn: return "saito_Ln";
    case BaselineSource::BlaisLn: return "blais_Ln";
    case BaselineSource::BlaisSpecial5: return "blais_special5";
    case BaselineSource::BarencoKn: return "barenco_Kn";
    case BaselineSource::FormulaKn: return "formula_Kn";
  }
  return "unknown";
}

GateFamily parse_gate_family(std::string_view text) {
  if (text == "qft") return GateFamily::Qft;
  if (text == "cn_not" || text == "cnnot" || text == "cnot" || text == "toffoli") {
    return GateFamily::CnNot;
  }
  throw GateError("no baseline family for gate '" + std::string(text) + "'");
}

namespace {

using BaselineKey = std::tuple<GateFamily, BaselineSource, int>;

const std::map<BaselineKey, double>& baseline_table() {
  static const std::map<BaselineKey, double> table = {
      // Standard QFT decomposition on L_n.
      {{GateFamily::Qft, BaselineSource::SaitoLn, 2}, 1.75},
      {{GateFamily::Qft, BaselineSource::SaitoLn, 3}, 8.13},
      {{GateFamily::Qft, BaselineSource::SaitoLn, 4}, 17.56},
      {{GateFamily::Qft, BaselineSource::SaitoLn, 5}, 30.03},
      {{GateFamily::Qft, BaselineSource::SaitoLn, 6}, 45.52},
      // Scalable QFT decomposition on L_n.
      {{GateFamily::Qft, BaselineSource::BlaisLn, 2}, 1.75},
      {{GateFamily::Qft, BaselineSource::BlaisLn, 3}, 5.13},
      {{GateFamily::Qft, BaselineSource::BlaisLn, 4}, 8.50},
      {{GateFamily::Qft, BaselineSource::BlaisLn, 5}, 11.88},
      {{GateFamily::Qft, BaselineSource::BlaisLn, 6}, 15.25},
      // Non-scalable five-qubit QFT.
      {{GateFamily::Qft, BaselineSource::BlaisSpecial5, 5}, 8.81},
      // C^{n-1}NOT decomposition on K_n.
      {{GateFamily::CnNot, BaselineSource::BarencoKn, 2}, 0.5},
      {{GateFamily::CnNot, BaselineSource::BarencoKn, 3}, 3.0},
      {{GateFamily::CnNot, BaselineSource::BarencoKn, 4}, 7.0},
      {{GateFamily::CnNot, BaselineSource::BarencoKn, 5}, 15.0},
      {{GateFamily::CnNot, BaselineSource::BarencoKn, 6}, 31.0},
  };
  return table;
}

}  // namespace

double baseline_time(GateFamily family, BaselineSource source, int n) {
  if (source == BaselineSource::FormulaKn) {
    if (family != GateFamily::Qft || n < 1) {
      throw BaselineMissing("no baseline for " + std::string(to_string(family)) + " from " +
                            std::string(to_string(source)) + " at n = " + std::to_string(n));
    }
    // Controlled-phase ladder plus the final swap on K_n.
    return 0.25 * (n + 3);
  }
  const auto& table = baseline_table();
  const auto it = table.find({family, source, n});
  if (it == table.end()) {
    throw BaselineMissing("no baseline for " + std::string(to_string(family)) + " from " +
                          std::string(to_string(source)) + " at n = " + std::to_string(n));
  }
  return it->second;
}

std::vector<BaselineSource> baseline_sources(GateFamily family, TopologyKind topology) {
  if (family == GateFamily::Qft && topology == TopologyKind::Chain) {
    return {BaselineSource::SaitoLn, BaselineSource::BlaisLn, BaselineSource::BlaisSpecial5};
  }
  if (family == GateFamily::Qft && topology == TopologyKind::Complete) {
    return {BaselineSource::FormulaKn};
  }
  if (family == GateFamily::CnNot && topology == TopologyKind::Complete) {
    return {BaselineSource::BarencoKn};
  }
  return {};
}

std::optional<double> published_best_time(GateFamily family, int n) {
  static const std::map<std::pair<GateFamily, int>, double> best = {
      {{GateFamily::Qft, 2}, 1.25},   {{GateFamily::Qft, 3}, 2.05},
      {{GateFamily::Qft, 4}, 3.15},   {{GateFamily::Qft, 5}, 4.44},
      {{GateFamily::Qft, 6}, 5.43},   {{GateFamily::CnNot, 2}, 0.50},
      {{GateFamily::CnNot, 3}, 1.01}, {{GateFamily::CnNot, 4}, 1.90},
      {{GateFamily::CnNot, 5}, 3.37}, {{GateFamily::CnNot, 6}, 4.59},
  };
  const auto it = best.find({family, n});
  if (it == best.end()) return std::nullopt;
  return it->second;
}

}  // namespace pulsesynth
