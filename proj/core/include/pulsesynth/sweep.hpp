#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsesynth/gates.hpp"
#include "pulsesynth/grape.hpp"
#include "pulsesynth/pulse_io.hpp"
#include "pulsesynth/spin_system.hpp"

namespace pulsesynth {

/// Duration sweep. Grid points are visited in descending T; each point is
/// warm-started from the next-longer point's best sequence (time-rescaled)
/// and topped up with fresh random restarts.
///
/// With coarse_step > t_step the sweep runs in two stages: a coarse scan
/// from t_stop down, then a t_step refinement between the shortest coarse
/// success and the coarse point below it.
struct SweepConfig {
  double t_start = 0.1;
  double t_stop = 1.0;
  double t_step = 0.01;
  double coarse_step = 0.1;
  int restarts = 20;
  bool warm_start = true;
  double fidelity_target = 0.99999;
  /// Slices per grid point; 0 selects default_slice_count(T).
  int slices = 0;
  /// Stop descending after this many consecutive failed points below a
  /// success (0 = never).
  int stop_after_failures = 2;
  OptimizationConfig optimization;

  void validate() const;
};

struct SweepPoint {
  double T = 0.0;
  double best_fidelity = 0.0;
  int restarts_used = 0;
  bool converged = false;
  /// Failed to reach the target although a shorter T succeeded.
  bool optimizer_failure = false;
  OptimizationResult result;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // ascending T
  std::optional<double> minimal_time;
  std::vector<std::uint64_t> seeds;

  const SweepPoint* at(double T) const;
  /// Point with the highest fidelity.
  const SweepPoint& best() const;
};

SweepResult fidelity_curve(const SpinSystem& sys, const TargetGate& target,
                           const SweepConfig& config);

class NoFeasibleTime : public std::runtime_error {
 public:
  NoFeasibleTime(const std::string& what, SweepResult sweep)
      : std::runtime_error(what), sweep_(std::move(sweep)) {}
  const SweepResult& sweep() const { return sweep_; }

 private:
  SweepResult sweep_;
};

/// Smallest grid T reaching the fidelity target, rounded to 0.01. Throws
/// NoFeasibleTime (carrying the full sweep) when no grid point succeeds.
double minimal_time(const SpinSystem& sys, const TargetGate& target, const SweepConfig& config);

/// Rounds to 0.01.
double round_hundredths(double x);

/// CSV columns: T,best_F,deficit,restarts_used,converged,optimizer_failure.
void write_curve_csv(std::ostream& os, const SweepResult& sweep, const RunManifest& manifest);

struct SpeedupRow {
  BaselineSource source;
  double baseline = 0.0;
  double tau = 0.0;
  double ratio = 0.0;  // baseline / tau, rounded to 0.01
};

struct SpeedupReport {
  GateFamily family;
  TopologyKind topology;
  int n = 0;
  double tau = 0.0;
  std::vector<SpeedupRow> rows;
  std::vector<std::string> notices;  // omitted sources
};

SpeedupReport speedup_report(GateFamily family, TopologyKind topology, int n, double tau);

/// Plain-text table: one line per baseline source.
void write_speedup_table(std::ostream& os, const SpeedupReport& report);

}  // namespace pulsesynth
