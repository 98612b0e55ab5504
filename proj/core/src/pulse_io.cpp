#include "pulsesynth/pulse_io.hpp"

#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace pulsesynth {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string hostname() {
  std::array<char, 256> buf{};
  if (gethostname(buf.data(), buf.size() - 1) != 0) return "unknown";
  return buf.data();
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw FormatError("bad number for '" + key + "': '" + value + "'");
  }
  if (used != value.size()) throw FormatError("bad number for '" + key + "': '" + value + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw FormatError("bad integer for '" + key + "': '" + value + "'");
  }
  if (used != value.size()) throw FormatError("bad integer for '" + key + "': '" + value + "'");
  return v;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

RunManifest RunManifest::create(const std::string& canonical_config) {
  RunManifest m;
  m.config_hash = fnv1a_hex(canonical_config);
  m.host = hostname();
  return m;
}

void RunManifest::write(std::ostream& os) const {
  os << "# tool_version=" << tool_version << "\n";
  os << "# config_hash=" << config_hash << "\n";
  os << "# seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
  os << "\n";
  os << "# wall_time_s=" << wall_time << "\n";
  os << "# host=" << host << "\n";
}

std::string format_edges(const CouplingGraph& graph) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const Edge& e : graph.edges()) {
    os << (first ? "" : ",") << e.a << "-" << e.b << ":" << e.J;
    first = false;
  }
  return os.str();
}

std::vector<Edge> parse_edges(const std::string& text) {
  std::vector<Edge> edges;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    Edge e;
    char dash = 0;
    char colon = 0;
    std::istringstream is(item);
    if (!(is >> e.a >> dash >> e.b) || dash != '-') {
      throw FormatError("bad edge '" + item + "' (expected a-b or a-b:J)");
    }
    if (is >> colon) {
      if (colon != ':' || !(is >> e.J)) throw FormatError("bad edge coupling in '" + item + "'");
    }
    std::string rest;
    if (is >> rest) throw FormatError("trailing characters in edge '" + item + "'");
    edges.push_back(e);
  }
  return edges;
}

void write_pulse_record(std::ostream& os, const PulseRecord& r, const RunManifest& manifest) {
  const PulseSequence& seq = r.sequence;
  os << "# pulsesynth pulse sequence\n";
  manifest.write(os);
  os << std::setprecision(17);
  os << "gate=" << r.gate << "\n";
  os << "n=" << r.graph.qubits() << "\n";
  os << "topology=" << to_string(r.graph.kind()) << "\n";
  os << "edges=" << format_edges(r.graph) << "\n";
  os << "umax=" << r.amplitude_bound << "\n";
  os << "T=" << seq.total_duration << "\n";
  os << "M=" << seq.slices() << "\n";
  os << "functional=" << format_functional(r.functional) << "\n";
  os << "seed=" << r.seed << "\n";
  os << "fidelity=" << r.fidelity << "\n";
  os << "slices\n";
  for (int k = 0; k < seq.slices(); ++k) {
    os << k << " " << seq.durations[static_cast<std::size_t>(k)];
    for (int j = 0; j < seq.channels(); ++j) os << " " << seq.amplitudes(k, j);
    os << "\n";
  }
}

PulseRecord read_pulse_record(std::istream& is) {
  std::map<std::string, std::string> header;
  std::string line;
  bool in_slices = false;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "slices") {
      in_slices = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("expected key=value, got '" + line + "'");
    header[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (!in_slices) throw FormatError("pulse file has no 'slices' section");

  auto need = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw FormatError(std::string("pulse file is missing '") + key + "'");
    return it->second;
  };

  const int n = static_cast<int>(to_u64("n", need("n")));
  const TopologyKind kind = parse_topology_kind(need("topology"));
  std::vector<Edge> edges = parse_edges(header.count("edges") ? header["edges"] : "");
  const double T = to_double("T", need("T"));
  const int m = static_cast<int>(to_u64("M", need("M")));

  PulseRecord r;
  r.gate = need("gate");
  r.graph = edges.empty() ? CouplingGraph::uncoupled(n) : CouplingGraph(n, std::move(edges), kind);
  r.amplitude_bound = to_double("umax", need("umax"));
  r.seed = header.count("seed") ? to_u64("seed", header["seed"]) : 0;
  r.fidelity = to_double("fidelity", need("fidelity"));
  const std::string functional = need("functional");
  if (functional == "psu") {
    r.functional = Functional::psu();
  } else if (functional.starts_with("su:")) {
    r.functional = Functional::su(to_double("functional", functional.substr(3)));
  } else {
    throw FormatError("bad functional '" + functional + "'");
  }

  if (m < 1) throw FormatError("M must be positive");
  const int channels = 2 * n;
  PulseSequence seq;
  seq.total_duration = T;
  seq.durations.resize(static_cast<std::size_t>(m));
  seq.amplitudes = AmplitudeMatrix::Zero(m, channels);
  for (int k = 0; k < m; ++k) {
    do {
      if (!std::getline(is, line)) throw FormatError("pulse file ends before slice " + std::to_string(k));
      line = trim(line);
    } while (line.empty() || line[0] == '#');
    std::istringstream row(line);
    int index = -1;
    if (!(row >> index) || index != k) throw FormatError("slice index mismatch at slice " + std::to_string(k));
    if (!(row >> seq.durations[static_cast<std::size_t>(k)])) {
      throw FormatError("missing duration at slice " + std::to_string(k));
    }
    for (int j = 0; j < channels; ++j) {
      if (!(row >> seq.amplitudes(k, j))) {
        throw FormatError("missing amplitude at slice " + std::to_string(k));
      }
    }
    std::string extra;
    if (row >> extra) throw FormatError("extra columns at slice " + std::to_string(k));
  }
  r.sequence = std::move(seq);
  return r;
}

void save_pulse_record(const std::filesystem::path& path, const PulseRecord& record,
                       const RunManifest& manifest) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  write_pulse_record(os, record, manifest);
}

PulseRecord load_pulse_record(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot read " + path.string());
  return read_pulse_record(is);
}

void write_trace_csv(std::ostream& os, const std::vector<double>& trace,
                     const RunManifest& manifest) {
  manifest.write(os);
  os << "iteration,F\n" << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) os << i << "," << trace[i] << "\n";
}

std::map<std::string, std::string> read_config(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty()) throw FormatError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot read config " + path.string());
  return read_config(is);
}

}  // namespace pulsesynth
