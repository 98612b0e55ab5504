#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "pulsesynth/gates.hpp"
#include "pulsesynth/grape.hpp"
#include "pulsesynth/pulse_io.hpp"
#include "pulsesynth/selftest.hpp"
#include "pulsesynth/spin_system.hpp"
#include "pulsesynth/sweep.hpp"

namespace pulsesynth::cli {

namespace {

namespace fs = std::filesystem;

struct SystemArgs {
  std::string gate;
  std::string topology = "chain";
  int n = 2;
  std::string couplings = "1";
  std::string edges;
  double umax = kDefaultAmplitudeBound;
};

struct RunArgs {
  std::string functional = "psu";
  int slices = 0;
  int restarts = 20;
  std::uint64_t seed = 1;
  int max_iterations = 5000;
  double target = 0.99999;
  std::string direction = "conjugate";
  double init_fraction = 0.1;
  int threads = 1;
  std::string out;
};

struct SweepArgs {
  double t_start = 0.1;
  double t_stop = 1.0;
  double t_step = 0.01;
  double coarse_step = 0.1;
  int stop_after = 2;
  bool no_warm_start = false;
};

void add_system_options(CLI::App* app, SystemArgs& a) {
  app->add_option("--gate", a.gate,
                  "qft, cn_not, toffoli, identity, swap(a,b), hadamard(q), cnot(c,t), "
                  "cphase(theta,a,b), zz(theta,a,b), zzz(t[,J])")
      ->required();
  app->add_option("--topology", a.topology, "chain|complete|cycle|star|custom (or L, K)")
      ->capture_default_str();
  app->add_option("--n", a.n, "number of qubits")->capture_default_str()->check(CLI::Range(1, 10));
  app->add_option("--J", a.couplings, "coupling: one value, or a comma list with one per edge")
      ->capture_default_str();
  app->add_option("--edges", a.edges, "custom topology edges, e.g. 0-1,1-2:0.5");
  app->add_option("--umax", a.umax, "control amplitude bound in rad per 1/J (default 50*2pi)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_run_options(CLI::App* app, RunArgs& a) {
  app->add_option("--functional", a.functional, "psu, su:<phase> or su:auto")->capture_default_str();
  app->add_option("--slices", a.slices, "time slices M (0: max(20, ceil(40 T)))")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app->add_option("--restarts", a.restarts, "random restarts")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--seed", a.seed, "base random seed")->capture_default_str();
  app->add_option("--max-iterations", a.max_iterations)->capture_default_str()->check(CLI::NonNegativeNumber);
  app->add_option("--target", a.target, "fidelity target")->capture_default_str();
  app->add_option("--direction", a.direction, "conjugate|steepest")->capture_default_str();
  app->add_option("--init-fraction", a.init_fraction, "initial amplitudes in +-f*umax")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--threads", a.threads, "concurrent restarts (0: all cores)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app->add_option("--out", a.out, "output directory");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) {
      throw std::invalid_argument("bad coupling value '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty coupling list");
  return out;
}

CouplingGraph build_graph(const SystemArgs& a) {
  const TopologyKind kind = parse_topology_kind(a.topology);
  const std::vector<double> js = parse_list(a.couplings);
  if (kind == TopologyKind::Custom) {
    if (a.edges.empty()) throw std::invalid_argument("--topology custom needs --edges");
    std::vector<Edge> edges = parse_edges(a.edges);
    const bool explicit_j = a.edges.find(':') != std::string::npos;
    if (js.size() == edges.size()) {
      if (explicit_j) throw std::invalid_argument("give couplings either in --edges or in --J");
      for (std::size_t i = 0; i < edges.size(); ++i) edges[i].J = js[i];
    } else if (js.size() == 1) {
      if (!explicit_j) {
        for (Edge& e : edges) e.J = js[0];
      }
    } else {
      throw std::invalid_argument("--J lists " + std::to_string(js.size()) + " couplings for " +
                                  std::to_string(edges.size()) + " edges");
    }
    return make_topology(a.n, std::move(edges));
  }
  if (!a.edges.empty()) throw std::invalid_argument("--edges is only valid with --topology custom");
  if (js.size() == 1) return make_topology(kind, a.n, js[0]);
  return make_topology(kind, a.n, std::span<const double>(js));
}

OptimizationConfig build_optimization(const RunArgs& a, const TargetGate& gate) {
  OptimizationConfig c;
  c.functional = parse_functional(a.functional, gate);
  c.restarts = a.restarts;
  c.seed = a.seed;
  c.max_iterations = a.max_iterations;
  c.fidelity_target = a.target;
  c.direction = parse_ascent_direction(a.direction);
  c.init_fraction = a.init_fraction;
  c.threads = a.threads;
  c.validate();
  return c;
}

std::string canonical(const SystemArgs& s, const RunArgs& r, const std::string& command) {
  std::ostringstream os;
  os << std::setprecision(17) << "command=" << command << "\ngate=" << s.gate
     << "\ntopology=" << s.topology << "\nn=" << s.n << "\nJ=" << s.couplings
     << "\nedges=" << s.edges << "\numax=" << s.umax << "\nfunctional=" << r.functional
     << "\nslices=" << r.slices << "\nrestarts=" << r.restarts << "\nseed=" << r.seed
     << "\nmax-iterations=" << r.max_iterations << "\ntarget=" << r.target
     << "\ndirection=" << r.direction << "\ninit-fraction=" << r.init_fraction << "\n";
  return os.str();
}

std::optional<GateFamily> family_of(const TargetGate& g) {
  if (max_abs(g.matrix - qft(g.n).matrix) < 1e-12) return GateFamily::Qft;
  if (g.n >= 2 && max_abs(g.matrix - cn_not(g.n).matrix) < 1e-12) return GateFamily::CnNot;
  return std::nullopt;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  writer(os);
}

void print_result(std::ostream& out, const OptimizationResult& r) {
  out << std::setprecision(12) << "F=" << r.fidelity << " converged=" << (r.converged ? "yes" : "no")
      << " iterations=" << r.iterations << " restarts=" << r.restarts_run
      << " restart_index=" << r.restart_index << " seed=" << r.seed << std::setprecision(4)
      << " wall_s=" << r.wall_time << "\n";
}

PulseRecord make_record(const SystemArgs& s, const CouplingGraph& graph, const OptimizationConfig& c,
                        const OptimizationResult& r) {
  PulseRecord rec;
  rec.gate = s.gate;
  rec.graph = graph;
  rec.amplitude_bound = s.umax;
  rec.functional = c.functional;
  rec.seed = r.seed;
  rec.fidelity = r.fidelity;
  rec.sequence = r.sequence;
  return rec;
}

int cmd_optimize(const SystemArgs& s, const RunArgs& r, double T, std::ostream& out) {
  const CouplingGraph graph = build_graph(s);
  const SpinSystem sys(graph, s.umax);
  const TargetGate gate = parse_gate(s.gate, s.n);
  const OptimizationConfig cfg = build_optimization(r, gate);
  const int m = r.slices > 0 ? r.slices : default_slice_count(T);

  const OptimizationResult res = optimize(sys, gate, T, m, cfg);
  out << "gate=" << s.gate << " n=" << s.n << " topology=" << to_string(graph.kind()) << " T=" << T
      << " M=" << m << " functional=" << format_functional(cfg.functional) << "\n";
  print_result(out, res);

  if (!r.out.empty()) {
    const fs::path dir = prepare_out(r.out);
    RunManifest manifest = RunManifest::create(canonical(s, r, "optimize") + "time=" + std::to_string(T));
    for (int i = 0; i < res.restarts_run; ++i) manifest.seeds.push_back(restart_seed(cfg.seed, i));
    manifest.wall_time = res.wall_time;
    write_file(dir / "pulse.txt", [&](std::ostream& os) {
      write_pulse_record(os, make_record(s, graph, cfg, res), manifest);
    });
    write_file(dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, res.trace, manifest); });
    out << "wrote " << (dir / "pulse.txt").string() << " and " << (dir / "trace.csv").string() << "\n";
  }
  return res.converged ? kSuccess : kNotConverged;
}

int cmd_sweep(const SystemArgs& s, const RunArgs& r, const SweepArgs& w, std::ostream& out) {
  const CouplingGraph graph = build_graph(s);
  const SpinSystem sys(graph, s.umax);
  const TargetGate gate = parse_gate(s.gate, s.n);

  SweepConfig cfg;
  cfg.t_start = w.t_start;
  cfg.t_stop = w.t_stop;
  cfg.t_step = w.t_step;
  cfg.coarse_step = w.coarse_step;
  cfg.stop_after_failures = w.stop_after;
  cfg.warm_start = !w.no_warm_start;
  cfg.restarts = r.restarts;
  cfg.fidelity_target = r.target;
  cfg.slices = r.slices;
  cfg.optimization = build_optimization(r, gate);
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  const SweepResult sweep = fidelity_curve(sys, gate, cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out << "T        best_F          restarts converged\n";
  for (const SweepPoint& p : sweep.points) {
    out << std::fixed << std::setprecision(2) << std::setw(6) << p.T << "   " << std::setprecision(10)
        << p.best_fidelity << std::defaultfloat << "  " << std::setw(8) << p.restarts_used << " "
        << (p.converged ? "yes" : "no") << (p.optimizer_failure ? " (optimizer failure)" : "") << "\n";
  }

  std::ostringstream sweep_cfg;
  sweep_cfg << std::setprecision(17) << "t-start=" << w.t_start << "\nt-stop=" << w.t_stop
            << "\nt-step=" << w.t_step << "\ncoarse-step=" << w.coarse_step
            << "\nstop-after=" << w.stop_after << "\nwarm-start=" << !w.no_warm_start << "\n";
  RunManifest manifest = RunManifest::create(canonical(s, r, "sweep") + sweep_cfg.str());
  manifest.seeds = sweep.seeds;
  manifest.wall_time = wall;

  std::optional<SpeedupReport> report;
  if (sweep.minimal_time) {
    const double tau = round_hundredths(*sweep.minimal_time);
    out << "minimal time tau* = " << std::fixed << std::setprecision(2) << tau << std::defaultfloat
        << " (1/J)\n";
    if (const auto family = family_of(gate)) {
      report = speedup_report(*family, graph.kind(), s.n, tau);
      write_speedup_table(out, *report);
    }
  } else {
    out << "no grid point reached F >= " << r.target << "\n";
  }

  if (!r.out.empty()) {
    const fs::path dir = prepare_out(r.out);
    write_file(dir / "curve.csv", [&](std::ostream& os) { write_curve_csv(os, sweep, manifest); });
    if (!sweep.points.empty()) {
      const SweepPoint& chosen = sweep.minimal_time ? *sweep.at(*sweep.minimal_time) : sweep.best();
      write_file(dir / "pulse.txt", [&](std::ostream& os) {
        write_pulse_record(os, make_record(s, graph, cfg.optimization, chosen.result), manifest);
      });
    }
    if (report) {
      write_file(dir / "speedup.txt", [&](std::ostream& os) {
        manifest.write(os);
        write_speedup_table(os, *report);
      });
    }
    out << "wrote results to " << dir.string() << "\n";
  }
  return sweep.minimal_time ? kSuccess : kNotConverged;
}

int cmd_verify(const std::string& file, double tolerance, std::ostream& out) {
  const PulseRecord rec = load_pulse_record(file);
  const SpinSystem sys(rec.graph, rec.amplitude_bound);
  const TargetGate gate = parse_gate(rec.gate, rec.graph.qubits());
  const double f = simulate_fidelity(rec.sequence, sys, gate, rec.functional);
  const double diff = std::abs(f - rec.fidelity);
  out << std::setprecision(17) << "stored F=" << rec.fidelity << "\nrecomputed F=" << f
      << "\n|difference|=" << std::setprecision(3) << diff << "\n";
  const bool ok = diff <= tolerance;
  out << (ok ? "OK" : "MISMATCH") << "\n";
  return ok ? kSuccess : kNotConverged;
}

int cmd_baseline(const std::string& result, std::string family_text, std::string topology_text,
                 int n, double tau, std::ostream& out) {
  std::optional<GateFamily> family;
  std::optional<TopologyKind> topology;
  if (!result.empty()) {
    const PulseRecord rec = load_pulse_record(result);
    family = family_of(parse_gate(rec.gate, rec.graph.qubits()));
    if (!family) throw std::invalid_argument("gate '" + rec.gate + "' has no baseline family");
    topology = rec.graph.kind();
    n = rec.graph.qubits();
    if (!(tau > 0.0)) tau = round_hundredths(rec.sequence.total_duration);
  }
  if (!family_text.empty()) family = parse_gate_family(family_text);
  if (!topology_text.empty()) topology = parse_topology_kind(topology_text);
  if (!family || !topology) throw std::invalid_argument("need --result or both --family and --topology");

  if (tau > 0.0) {
    if (n < 1) throw std::invalid_argument("need --n with --tau");
    write_speedup_table(out, speedup_report(*family, *topology, n, tau));
    return kSuccess;
  }
  // No duration given: print the stored tables for this family and topology.
  out << "# " << to_string(*family) << " on " << to_string(*topology) << " topologies\n";
  out << std::left << std::setw(4) << "n" << std::setw(16) << "source" << "tau_std[1/J]\n";
  for (int k = 2; k <= 6; ++k) {
    if (n > 0 && k != n) continue;
    for (BaselineSource src : baseline_sources(*family, *topology)) {
      try {
        const double t = baseline_time(*family, src, k);
        out << std::left << std::setw(4) << k << std::setw(16) << to_string(src) << t << "\n";
      } catch (const BaselineMissing&) {
      }
    }
    if (const auto best = published_best_time(*family, k)) {
      out << std::left << std::setw(4) << k << std::setw(16) << "published_best" << *best << "\n";
    }
  }
  return kSuccess;
}

int cmd_selftest(std::uint64_t seed, int problems, int samples, std::ostream& out) {
  SelftestOptions opt;
  opt.seed = seed;
  opt.gradient_problems = problems;
  opt.unitary_samples = samples;
  bool ok = true;
  for (const CheckResult& r : run_selftest(opt)) {
    write_check(out, r);
    ok = ok && r.passed;
  }
  return ok ? kSuccess : kNotConverged;
}

}  // namespace

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  if (args.size() < 2 || args[1].starts_with("-")) {
    throw std::invalid_argument("--config must follow a subcommand");
  }
  std::vector<std::string> tokens;
  for (const auto& [key, value] : load_config(*path)) {
    tokens.push_back(value.empty() ? "--" + key : "--" + key + "=" + value);
  }
  args.insert(args.begin() + 2, tokens.begin(), tokens.end());
  return args;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-optimal gate synthesis on Ising-coupled qubit networks", "pulsesynth"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  app.footer("Any subcommand accepts --config FILE with key=value lines named after its long flags; "
             "flags on the command line take precedence.");

  SystemArgs sys_args;
  RunArgs run_args;
  SweepArgs sweep_args;
  double time = 0.0;

  CLI::App* optimize_cmd = app.add_subcommand("optimize", "optimize one (gate, system, T) problem");
  add_system_options(optimize_cmd, sys_args);
  add_run_options(optimize_cmd, run_args);
  optimize_cmd->add_option("--time", time, "total duration T in 1/J")->required()->check(CLI::PositiveNumber);

  SystemArgs sweep_sys;
  RunArgs sweep_run;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "fidelity-vs-duration curve and minimal time");
  add_system_options(sweep_cmd, sweep_sys);
  add_run_options(sweep_cmd, sweep_run);
  sweep_cmd->add_option("--t-start", sweep_args.t_start)->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--t-stop", sweep_args.t_stop)->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--t-step", sweep_args.t_step)->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--coarse-step", sweep_args.coarse_step, "0 disables the coarse pre-scan")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--stop-after", sweep_args.stop_after,
                        "stop after this many consecutive failures below a success (0: never)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_flag("--no-warm-start", sweep_args.no_warm_start);

  std::string result_file;
  std::string family_text;
  std::string topology_text;
  int baseline_n = 0;
  double tau = 0.0;
  CLI::App* baseline_cmd = app.add_subcommand("baseline", "standard-circuit times and speed-ups");
  baseline_cmd->add_option("--result", result_file, "pulse file; supplies family, topology, n and T");
  baseline_cmd->add_option("--family", family_text, "qft or cn_not");
  baseline_cmd->add_option("--topology", topology_text, "chain or complete");
  baseline_cmd->add_option("--n", baseline_n)->check(CLI::PositiveNumber);
  baseline_cmd->add_option("--tau", tau, "achieved minimal time in 1/J")->check(CLI::PositiveNumber);

  std::string verify_file;
  double verify_tol = 1e-9;
  CLI::App* verify_cmd = app.add_subcommand("verify", "re-simulate a stored pulse sequence");
  verify_cmd->add_option("file", verify_file)->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--tolerance", verify_tol)->capture_default_str();

  std::uint64_t st_seed = SelftestOptions{}.seed;
  int st_problems = SelftestOptions{}.gradient_problems;
  int st_samples = SelftestOptions{}.unitary_samples;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "gradient, unitarity and identity checks");
  selftest_cmd->add_option("--seed", st_seed)->capture_default_str();
  selftest_cmd->add_option("--problems", st_problems, "random gradient problems")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  selftest_cmd->add_option("--samples", st_samples, "random unitaries per dimension")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  try {
    args = expand_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*optimize_cmd) return cmd_optimize(sys_args, run_args, time, out);
    if (*sweep_cmd) {
      if (sweep_args.t_stop < sweep_args.t_start) {
        throw std::invalid_argument("--t-stop must not be below --t-start");
      }
      return cmd_sweep(sweep_sys, sweep_run, sweep_args, out);
    }
    if (*baseline_cmd) return cmd_baseline(result_file, family_text, topology_text, baseline_n, tau, out);
    if (*verify_cmd) return cmd_verify(verify_file, verify_tol, out);
    if (*selftest_cmd) return cmd_selftest(st_seed, st_problems, st_samples, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BaselineMissing& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace pulsesynth::cli
