#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pulsesynth/gates.hpp"
#include "pulsesynth/linalg.hpp"
#include "pulsesynth/spin_system.hpp"

namespace pulsesynth {

// slices x channels, row-major so each slice is contiguous
using AmplitudeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Piecewise-constant controls: slice k lasts durations[k] and applies
/// amplitudes(k, j) to control channel j.
struct PulseSequence {
  std::vector<double> durations;
  AmplitudeMatrix amplitudes;
  double total_duration = 0.0;

  /// M equal slices over T with all amplitudes zero.
  static PulseSequence uniform(double T, int slices, int channels);

  int slices() const { return static_cast<int>(durations.size()); }
  int channels() const { return static_cast<int>(amplitudes.cols()); }

  /// Throws std::invalid_argument if the shape does not match `sys`, a
  /// duration is non-positive, sum(durations) != total_duration (to 1e-9
  /// relative), or an amplitude exceeds the system's bound.
  void validate(const SpinSystem& sys) const;

  /// Same control shape stretched or shrunk to total time T over `slices`
  /// equal slices; amplitudes are resampled piecewise-constantly.
  PulseSequence rescaled(double T, int slices) const;
};

/// Default slice count for a duration T (in 1/J_ref).
int default_slice_count(double T);

/// Fidelity functional. `su` compares against e^{i phase} U_G and maximizes
/// Re tr(.)/N; `psu` maximizes |tr(U_G^dagger U)|^2 / N^2.
struct Functional {
  enum class Kind { Su, Psu };
  Kind kind = Kind::Psu;
  double phase = 0.0;

  static Functional su(double phi) { return {Kind::Su, phi}; }
  static Functional psu() { return {Kind::Psu, 0.0}; }
  bool is_psu() const { return kind == Kind::Psu; }
};

std::string format_functional(const Functional& f);

/// Parses "psu", "su:<phase>" or "su:auto" (phase resolved against `gate`
/// as the smallest member of its global-phase family).
Functional parse_functional(std::string_view text, const TargetGate& gate);

/// The target with the phase mode the functional implies.
TargetGate apply_functional(const TargetGate& gate, const Functional& f);

// ---------------------------------------------------------------------------
// Propagation.

/// U(t_0) = 1, U(t_k) = exp(-i dt_k H^(k)) U(t_{k-1}); M + 1 entries.
std::vector<Matrix> forward_propagate(const PulseSequence& seq, const SpinSystem& sys);

/// Adjoint trajectory lambda(t_k), k = 0..M, with lambda(T) = -U_G' where
/// U_G' is the target's phased matrix, and
/// lambda(t_k) = exp(+i dt_{k+1} H^(k+1)) lambda(t_{k+1}).
std::vector<Matrix> backward_propagate(const PulseSequence& seq, const SpinSystem& sys,
                                       const TargetGate& target);

// ---------------------------------------------------------------------------
// Fidelities. Both normalized to 1 at U = U_G.

/// Re tr(U_G'^dagger U) / N, U_G' the phased target.
double fidelity_su(const Matrix& u, const TargetGate& target);

/// |tr(U_G^dagger U)|^2 / N^2.
double fidelity_psu(const Matrix& u, const TargetGate& target);

/// Reported trace fidelity: Re tr(e^{-i phi} U_G^dagger U)/N for su,
/// |tr(U_G^dagger U)|/N for psu.
double trace_fidelity(const Matrix& u, const TargetGate& target, const Functional& f);

// ---------------------------------------------------------------------------
// Gradients with respect to amplitudes(k, j). Exact at finite slice
// durations (spectral Frechet derivative of each slice propagator).

AmplitudeMatrix gradient_su(const PulseSequence& seq, const SpinSystem& sys,
                            const TargetGate& target);
AmplitudeMatrix gradient_psu(const PulseSequence& seq, const SpinSystem& sys,
                             const TargetGate& target);

/// First-order forms -dt Im tr(lambda^dagger H_j U)/N and
/// 2 dt Im(tr(U_G^dagger U) conj(tr(lambda^dagger H_j U)))/N^2, evaluated at
/// the slice end points. Agree with the exact gradients as dt -> 0.
AmplitudeMatrix gradient_su_first_order(const PulseSequence& seq, const SpinSystem& sys,
                                        const TargetGate& target);
AmplitudeMatrix gradient_psu_first_order(const PulseSequence& seq, const SpinSystem& sys,
                                         const TargetGate& target);

// ---------------------------------------------------------------------------
// Optimization.

enum class AscentDirection { Steepest, ConjugateGradient };

std::string_view to_string(AscentDirection d);
AscentDirection parse_ascent_direction(std::string_view text);

struct LineSearchPolicy {
  /// First trial step. Non-positive selects 0.05 * u_max / max|gradient|.
  double initial_step = 0.0;
  double backtrack_factor = 0.5;
  double growth_factor = 2.0;
  int max_trials = 40;
};

struct OptimizationConfig {
  Functional functional = Functional::psu();
  int max_iterations = 5000;
  double fidelity_target = 0.99999;
  double gradient_tolerance = 1e-10;
  LineSearchPolicy line_search;
  AscentDirection direction = AscentDirection::ConjugateGradient;
  std::uint64_t seed = 1;
  int restarts = 1;
  /// Initial amplitudes uniform in [-f u_max, f u_max]; 0 starts from zero.
  double init_fraction = 0.1;
  /// Stop launching restarts once one reaches the fidelity target.
  bool stop_at_first_success = true;
  /// Restarts evaluated concurrently; 0 means hardware concurrency.
  int threads = 1;

  void validate() const;
};

struct OptimizationResult {
  PulseSequence sequence;
  double fidelity = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // reported fidelity after each iteration, trace[0] initial
  double wall_time = 0.0;     // seconds, whole optimize() call
  bool converged = false;
  std::uint64_t seed = 0;     // seed of the winning restart
  int restart_index = 0;
  int restarts_run = 0;
};

/// Seed used by restart `index` of a run seeded with `seed`.
std::uint64_t restart_seed(std::uint64_t seed, int index);

/// Random initial sequence for one restart.
PulseSequence random_sequence(const SpinSystem& sys, double T, int slices, double init_fraction,
                              std::uint64_t seed);

/// One projected gradient-ascent run from `initial`.
OptimizationResult ascend(const SpinSystem& sys, const TargetGate& target,
                          PulseSequence initial, const OptimizationConfig& config);

/// Best of config.restarts independent runs over T with M slices. When
/// `warm_start` is given it is rescaled to (T, M) and used as restart 0.
OptimizationResult optimize(const SpinSystem& sys, const TargetGate& target, double T, int slices,
                            const OptimizationConfig& config,
                            const PulseSequence* warm_start = nullptr);

/// Reported fidelity of `seq` on `sys` against `target` under `f`.
double simulate_fidelity(const PulseSequence& seq, const SpinSystem& sys, const TargetGate& target,
                         const Functional& f);

}  // namespace pulsesynth
