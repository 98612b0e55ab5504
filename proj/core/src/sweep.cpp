#include "pulsesynth/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace pulsesynth {

void SweepConfig::validate() const {
  if (!(t_start > 0.0)) throw std::invalid_argument("sweep start must be positive");
  if (!(t_step > 0.0)) throw std::invalid_argument("sweep step must be positive");
  if (!(t_stop >= t_start)) throw std::invalid_argument("sweep stop must be >= start");
  if (coarse_step < 0.0) throw std::invalid_argument("coarse step must be >= 0");
  if (restarts < 1) throw std::invalid_argument("restarts per point must be >= 1");
  if (slices < 0) throw std::invalid_argument("slices must be >= 0");
  if (stop_after_failures < 0) throw std::invalid_argument("stop_after_failures must be >= 0");
  if (!(fidelity_target > 0.0 && fidelity_target <= 1.0)) {
    throw std::invalid_argument("fidelity target must lie in (0, 1]");
  }
  optimization.validate();
}

double round_hundredths(double x) { return std::round(x * 100.0) / 100.0; }

namespace {

// Grid values are snapped to 1e-9 so repeated subtraction does not drift.
double snap(double t) { return std::round(t * 1e9) / 1e9; }

/// Descending grid hi, hi - step, ... down to >= lo.
std::vector<double> descending_grid(double hi, double lo, double step) {
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double t = snap(hi - static_cast<double>(i) * step);
    if (t < lo - 1e-9) break;
    out.push_back(t);
  }
  return out;
}

class SweepRunner {
 public:
  SweepRunner(const SpinSystem& sys, const TargetGate& target, const SweepConfig& config)
      : sys_(sys), target_(target), config_(config) {
    opt_ = config.optimization;
    opt_.fidelity_target = config.fidelity_target;
    opt_.restarts = config.restarts;
  }

  /// Runs `grid` in order, warm-starting each point from the previous one.
  /// Returns the last visited point's best sequence.
  std::optional<PulseSequence> run(const std::vector<double>& grid,
                                   std::optional<PulseSequence> warm) {
    int failures_since_success = 0;
    bool seen_success = false;
    for (double T : grid) {
      if (points_.count(T)) continue;
      const int m = config_.slices > 0 ? config_.slices : default_slice_count(T);
      // Distinct seeds per grid point keep fresh restarts independent.
      OptimizationConfig cfg = opt_;
      cfg.seed = restart_seed(opt_.seed, static_cast<int>(std::llround(T * 1e6)));
      seeds_.push_back(cfg.seed);
      const PulseSequence* ws = (config_.warm_start && warm) ? &*warm : nullptr;
      OptimizationResult res = optimize(sys_, target_, T, m, cfg, ws);

      SweepPoint p;
      p.T = T;
      p.best_fidelity = res.fidelity;
      p.restarts_used = res.restarts_run;
      p.converged = res.converged;
      warm = res.sequence;
      p.result = std::move(res);
      const bool ok = p.converged;
      points_.emplace(T, std::move(p));

      if (ok) {
        seen_success = true;
        failures_since_success = 0;
      } else if (seen_success || !grid_allows_initial_failures_) {
        ++failures_since_success;
        if (config_.stop_after_failures > 0 &&
            failures_since_success >= config_.stop_after_failures) {
          break;
        }
      }
    }
    return warm;
  }

  void allow_initial_failures(bool allow) { grid_allows_initial_failures_ = allow; }

  const std::map<double, SweepPoint>& points() const { return points_; }
  std::map<double, SweepPoint>& points() { return points_; }
  std::vector<std::uint64_t>& seeds() { return seeds_; }

 private:
  const SpinSystem& sys_;
  const TargetGate& target_;
  const SweepConfig& config_;
  OptimizationConfig opt_;
  std::map<double, SweepPoint> points_;
  std::vector<std::uint64_t> seeds_;
  bool grid_allows_initial_failures_ = true;
};

}  // namespace

const SweepPoint* SweepResult::at(double T) const {
  for (const SweepPoint& p : points) {
    if (std::abs(p.T - T) < 1e-9) return &p;
  }
  return nullptr;
}

const SweepPoint& SweepResult::best() const {
  if (points.empty()) throw std::logic_error("empty sweep");
  return *std::max_element(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.best_fidelity < b.best_fidelity;
  });
}

SweepResult fidelity_curve(const SpinSystem& sys, const TargetGate& target,
                           const SweepConfig& config) {
  config.validate();
  SweepRunner runner(sys, target, config);

  const bool two_stage = config.coarse_step > config.t_step * (1.0 + 1e-9);
  if (!two_stage) {
    runner.run(descending_grid(config.t_stop, config.t_start, config.t_step), std::nullopt);
  } else {
    runner.run(descending_grid(config.t_stop, config.t_start, config.coarse_step), std::nullopt);
    // Shortest coarse success and its warm-start sequence.
    const SweepPoint* anchor = nullptr;
    for (const auto& [T, p] : runner.points()) {
      if (p.converged) {
        anchor = &p;
        break;
      }
    }
    if (anchor != nullptr) {
      const double hi = snap(anchor->T - config.t_step);
      const double lo = std::max(config.t_start, snap(anchor->T - config.coarse_step + config.t_step));
      if (hi >= lo - 1e-9) {
        runner.allow_initial_failures(false);
        runner.run(descending_grid(hi, lo, config.t_step), anchor->result.sequence);
      }
    }
  }

  SweepResult out;
  out.seeds = runner.seeds();
  for (auto& [T, p] : runner.points()) {
    if (!out.minimal_time && p.converged) out.minimal_time = T;
    out.points.push_back(std::move(p));
  }
  if (out.minimal_time) {
    for (SweepPoint& p : out.points) {
      p.optimizer_failure = p.T > *out.minimal_time && !p.converged;
    }
  }
  return out;
}

double minimal_time(const SpinSystem& sys, const TargetGate& target, const SweepConfig& config) {
  SweepResult sweep = fidelity_curve(sys, target, config);
  if (!sweep.minimal_time) {
    std::ostringstream os;
    os << "no grid point in [" << config.t_start << ", " << config.t_stop
       << "] reached F >= " << config.fidelity_target;
    if (!sweep.points.empty()) {
      os << "; best F = " << std::setprecision(10) << sweep.best().best_fidelity << " at T = "
         << sweep.best().T;
    }
    throw NoFeasibleTime(os.str(), std::move(sweep));
  }
  return round_hundredths(*sweep.minimal_time);
}

void write_curve_csv(std::ostream& os, const SweepResult& sweep, const RunManifest& manifest) {
  manifest.write(os);
  os << "T,best_F,deficit,restarts_used,converged,optimizer_failure\n";
  for (const SweepPoint& p : sweep.points) {
    os << std::setprecision(10) << p.T << "," << std::setprecision(17) << p.best_fidelity << ","
       << (1.0 - p.best_fidelity) << "," << p.restarts_used << "," << (p.converged ? 1 : 0) << ","
       << (p.optimizer_failure ? 1 : 0) << "\n";
  }
}

SpeedupReport speedup_report(GateFamily family, TopologyKind topology, int n, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("speedup_report: tau must be positive");
  SpeedupReport report{family, topology, n, tau, {}, {}};
  const auto sources = baseline_sources(family, topology);
  if (sources.empty()) {
    report.notices.push_back("no baseline tabulated for " + std::string(to_string(family)) +
                             " on " + std::string(to_string(topology)) + " topologies");
  }
  for (BaselineSource source : sources) {
    try {
      const double base = baseline_time(family, source, n);
      report.rows.push_back({source, base, tau, round_hundredths(base / tau)});
    } catch (const BaselineMissing& e) {
      report.notices.push_back(e.what());
    }
  }
  return report;
}

void write_speedup_table(std::ostream& os, const SpeedupReport& report) {
  os << "# " << to_string(report.family) << " on " << to_string(report.topology) << ", n = "
     << report.n << "\n";
  os << std::left << std::setw(16) << "source" << std::right << std::setw(12) << "tau_std[1/J]"
     << std::setw(12) << "tau[1/J]" << std::setw(10) << "speed-up" << "\n";
  os << std::fixed;
  for (const SpeedupRow& row : report.rows) {
    os << std::left << std::setw(16) << to_string(row.source) << std::right << std::setw(12)
       << std::setprecision(2) << row.baseline << std::setw(12) << row.tau << std::setw(10)
       << row.ratio << "\n";
  }
  os << std::defaultfloat;
  for (const std::string& note : report.notices) os << "# note: " << note << "\n";
}

}  // namespace pulsesynth
