#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsesynth/grape.hpp"
#include "pulsesynth/spin_system.hpp"

namespace pulsesynth {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance block written at the top of every output file as
/// `# key=value` comment lines.
struct RunManifest {
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::string tool_version = kToolVersion;
  double wall_time = 0.0;
  std::string host;

  /// Hash of a canonical configuration text, plus hostname and version.
  static RunManifest create(const std::string& canonical_config);

  void write(std::ostream& os) const;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

/// Everything needed to re-simulate a stored pulse sequence.
struct PulseRecord {
  std::string gate;  // spec accepted by parse_gate
  CouplingGraph graph = CouplingGraph::uncoupled(1);
  double amplitude_bound = kDefaultAmplitudeBound;
  Functional functional = Functional::psu();
  std::uint64_t seed = 0;
  double fidelity = 0.0;
  PulseSequence sequence;
};

/// Pulse-sequence text format:
///
///   # pulsesynth pulse sequence
///   # <manifest lines>
///   gate=qft
///   n=3
///   topology=chain
///   edges=0-1:1,1-2:1
///   umax=314.15926535897933
///   T=2.05
///   M=82
///   functional=psu
///   seed=123
///   fidelity=0.99999123
///   slices
///   0 0.025 u_1 ... u_2n
///   ...
///
/// Numbers are written with 17 significant digits so a round trip is exact.
void write_pulse_record(std::ostream& os, const PulseRecord& record, const RunManifest& manifest);
PulseRecord read_pulse_record(std::istream& is);

void save_pulse_record(const std::filesystem::path& path, const PulseRecord& record,
                       const RunManifest& manifest);
PulseRecord load_pulse_record(const std::filesystem::path& path);

std::string format_edges(const CouplingGraph& graph);
std::vector<Edge> parse_edges(const std::string& text);

/// Two-column CSV: iteration,F.
void write_trace_csv(std::ostream& os, const std::vector<double>& trace,
                     const RunManifest& manifest);

/// Flat key=value configuration. Blank lines and '#' comments are ignored;
/// keys are the long CLI flag names without dashes.
std::map<std::string, std::string> read_config(std::istream& is);
std::map<std::string, std::string> load_config(const std::filesystem::path& path);

}  // namespace pulsesynth
