#include "pulsesynth/grape.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pulsesynth {

// ---------------------------------------------------------------------------
// PulseSequence

PulseSequence PulseSequence::uniform(double T, int slices, int channels) {
  if (!(T > 0.0) || slices < 1 || channels < 1) {
    throw std::invalid_argument("PulseSequence::uniform: need T > 0, slices >= 1, channels >= 1");
  }
  PulseSequence seq;
  seq.durations.assign(static_cast<std::size_t>(slices), T / slices);
  seq.amplitudes = AmplitudeMatrix::Zero(slices, channels);
  seq.total_duration = T;
  return seq;
}

void PulseSequence::validate(const SpinSystem& sys) const {
  if (durations.empty()) {
    throw std::invalid_argument("pulse sequence has no slices");
  }
  if (amplitudes.rows() != slices() ||
      static_cast<std::size_t>(amplitudes.cols()) != sys.channel_count()) {
    throw std::invalid_argument("pulse sequence shape does not match the spin system");
  }
  double sum = 0.0;
  for (double dt : durations) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw std::invalid_argument("slice durations must be positive and finite");
    }
    sum += dt;
  }
  if (std::abs(sum - total_duration) > 1e-9 * std::max(1.0, total_duration)) {
    throw std::invalid_argument("slice durations do not add up to the total duration");
  }
  if (!amplitudes.allFinite()) {
    throw std::invalid_argument("non-finite control amplitude");
  }
  // Clipped values can sit exactly on the bound; allow rounding on parse.
  if (amplitudes.size() > 0 &&
      amplitudes.cwiseAbs().maxCoeff() > sys.amplitude_bound() * (1.0 + 1e-12)) {
    throw std::invalid_argument("control amplitude exceeds the system bound");
  }
}

PulseSequence PulseSequence::rescaled(double T, int new_slices) const {
  PulseSequence out = uniform(T, new_slices, channels());
  if (new_slices == slices()) {
    out.amplitudes = amplitudes;
    return out;
  }
  // Old slice boundaries in normalized time.
  std::vector<double> edges(durations.size() + 1, 0.0);
  for (std::size_t k = 0; k < durations.size(); ++k) {
    edges[k + 1] = edges[k] + durations[k] / total_duration;
  }
  for (int i = 0; i < new_slices; ++i) {
    const double mid = (i + 0.5) / new_slices;
    auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, mid);
    const auto k = static_cast<Eigen::Index>(std::distance(edges.begin() + 1, it));
    out.amplitudes.row(i) = amplitudes.row(k);
  }
  return out;
}

int default_slice_count(double T) {
  return std::max(20, static_cast<int>(std::ceil(40.0 * T - 1e-9)));
}

// ---------------------------------------------------------------------------
// Functionals

std::string format_functional(const Functional& f) {
  if (f.is_psu()) return "psu";
  std::ostringstream os;
  os.precision(17);
  os << "su:" << f.phase;
  return os.str();
}

Functional parse_functional(std::string_view text, const TargetGate& gate) {
  if (text == "psu") return Functional::psu();
  if (text == "su") return Functional::su(0.0);
  if (text.starts_with("su:")) {
    const std::string rest(text.substr(3));
    if (rest == "auto") return Functional::su(phase_family(gate).phi0);
    std::size_t used = 0;
    double phi = 0.0;
    try {
      phi = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) {
      throw std::invalid_argument("bad functional phase '" + rest + "'");
    }
    return Functional::su(phi);
  }
  throw std::invalid_argument("unknown functional '" + std::string(text) +
                              "' (expected psu, su:<phase> or su:auto)");
}

TargetGate apply_functional(const TargetGate& gate, const Functional& f) {
  return gate.with_phase_mode(f.is_psu() ? PhaseMode::projective() : PhaseMode::fixed(f.phase));
}

double fidelity_su(const Matrix& u, const TargetGate& target) {
  const auto dim = static_cast<double>(target.dim());
  return trace_inner(target.phased_matrix(), u).real() / dim;
}

double fidelity_psu(const Matrix& u, const TargetGate& target) {
  const auto dim = static_cast<double>(target.dim());
  return std::norm(trace_inner(target.matrix, u)) / (dim * dim);
}

double trace_fidelity(const Matrix& u, const TargetGate& target, const Functional& f) {
  const TargetGate phased = apply_functional(target, f);
  if (f.is_psu()) return std::sqrt(fidelity_psu(u, phased));
  return fidelity_su(u, phased);
}

// ---------------------------------------------------------------------------
// Dynamics

namespace {

struct SparseEntry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

using SparseOperator = std::vector<SparseEntry>;

std::vector<SparseOperator> sparse_controls(const SpinSystem& sys) {
  std::vector<SparseOperator> out;
  for (const ControlChannel& c : sys.controls()) {
    SparseOperator op;
    for (Eigen::Index r = 0; r < c.op.rows(); ++r) {
      for (Eigen::Index col = 0; col < c.op.cols(); ++col) {
        if (c.op(r, col) != Complex{}) op.push_back({r, col, c.op(r, col)});
      }
    }
    out.push_back(std::move(op));
  }
  return out;
}

/// tr(R H) for sparse H.
Complex trace_product(const Matrix& r, const SparseOperator& h) {
  Complex acc{};
  for (const SparseEntry& e : h) acc += r(e.col, e.row) * e.value;
  return acc;
}

/// Slice exponentials and forward trajectory of one pulse sequence.
class Trajectory {
 public:
  Trajectory(const SpinSystem& sys, const PulseSequence& seq) {
    seq.validate(sys);
    const int m = seq.slices();
    slices_.reserve(static_cast<std::size_t>(m));
    forward_.reserve(static_cast<std::size_t>(m) + 1);
    forward_.push_back(identity(sys.dim()));
    for (int k = 0; k < m; ++k) {
      const std::span<const double> row(seq.amplitudes.row(k).data(),
                                        static_cast<std::size_t>(seq.channels()));
      slices_.emplace_back(sys.hamiltonian(row), seq.durations[static_cast<std::size_t>(k)]);
      forward_.push_back(slices_.back().propagator() * forward_.back());
    }
  }

  const std::vector<SpectralExponential>& slices() const { return slices_; }
  const std::vector<Matrix>& forward() const { return forward_; }
  const Matrix& final_propagator() const { return forward_.back(); }

  std::vector<Matrix> backward(const Matrix& phased_target) const {
    const std::size_t m = slices_.size();
    std::vector<Matrix> lambda(m + 1);
    lambda[m] = -phased_target;
    for (std::size_t k = m; k-- > 0;) {
      lambda[k] = slices_[k].propagator().adjoint() * lambda[k + 1];
    }
    return lambda;
  }

  /// d tr(U_G'^dagger U(T)) / d amplitudes(k, j), exact.
  Eigen::MatrixXcd overlap_gradient(const Matrix& phased_target,
                                    const std::vector<SparseOperator>& controls) const {
    const std::vector<Matrix> lambda = backward(phased_target);
    const auto m = static_cast<Eigen::Index>(slices_.size());
    Eigen::MatrixXcd out(m, static_cast<Eigen::Index>(controls.size()));
    for (Eigen::Index k = 0; k < m; ++k) {
      const SpectralExponential& s = slices_[static_cast<std::size_t>(k)];
      const Matrix& w = s.eigenvectors();
      // tr(Y dU_k) with Y = -U(t_{k-1}) lambda(t_k)^dagger and
      // dU_k = W (Gamma o W^dagger H_j W) W^dagger  equals  tr(R H_j) with
      // R = W ((W^dagger Y W) o Gamma^T) W^dagger.
      const Matrix y = -forward_[static_cast<std::size_t>(k)] *
                       lambda[static_cast<std::size_t>(k) + 1].adjoint();
      const Matrix p = w.adjoint() * y * w;
      const Matrix r = w * p.cwiseProduct(s.kernel().transpose()) * w.adjoint();
      for (std::size_t j = 0; j < controls.size(); ++j) {
        out(k, static_cast<Eigen::Index>(j)) = trace_product(r, controls[j]);
      }
    }
    return out;
  }

 private:
  std::vector<SpectralExponential> slices_;
  std::vector<Matrix> forward_;
};

/// Normalized objective and its reported fidelity for one functional.
struct Objective {
  bool psu;
  Matrix phased_target;
  double dim;

  Objective(const TargetGate& target, const Functional& f)
      : psu(f.is_psu()),
        phased_target(apply_functional(target, f).phased_matrix()),
        dim(static_cast<double>(target.dim())) {}

  Complex overlap(const Matrix& u) const { return trace_inner(phased_target, u); }

  double value(Complex z) const { return psu ? std::norm(z) / (dim * dim) : z.real() / dim; }

  double reported(double v) const { return psu ? std::sqrt(std::max(0.0, v)) : v; }

  AmplitudeMatrix gradient(Complex z, const Eigen::MatrixXcd& dz) const {
    if (psu) return (2.0 / (dim * dim)) * (std::conj(z) * dz).real();
    return dz.real() / dim;
  }
};

}  // namespace

std::vector<Matrix> forward_propagate(const PulseSequence& seq, const SpinSystem& sys) {
  return Trajectory(sys, seq).forward();
}

std::vector<Matrix> backward_propagate(const PulseSequence& seq, const SpinSystem& sys,
                                       const TargetGate& target) {
  return Trajectory(sys, seq).backward(target.phased_matrix());
}

AmplitudeMatrix gradient_su(const PulseSequence& seq, const SpinSystem& sys,
                            const TargetGate& target) {
  const Trajectory traj(sys, seq);
  const Matrix phased = target.phased_matrix();
  const Eigen::MatrixXcd dz = traj.overlap_gradient(phased, sparse_controls(sys));
  return dz.real() / static_cast<double>(target.dim());
}

AmplitudeMatrix gradient_psu(const PulseSequence& seq, const SpinSystem& sys,
                             const TargetGate& target) {
  const Trajectory traj(sys, seq);
  const Eigen::MatrixXcd dz = traj.overlap_gradient(target.matrix, sparse_controls(sys));
  const Complex z = trace_inner(target.matrix, traj.final_propagator());
  const auto dim = static_cast<double>(target.dim());
  return (2.0 / (dim * dim)) * (std::conj(z) * dz).real();
}

namespace {

/// w(k, j) = tr(lambda^dagger(t_k) H_j U(t_k)) at the end of slice k.
Eigen::MatrixXcd adjoint_overlaps(const Trajectory& traj, const std::vector<Matrix>& lambda,
                                  const SpinSystem& sys) {
  const auto m = static_cast<Eigen::Index>(traj.slices().size());
  const auto& controls = sys.controls();
  Eigen::MatrixXcd w(m, static_cast<Eigen::Index>(controls.size()));
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto idx = static_cast<std::size_t>(k) + 1;
    for (std::size_t j = 0; j < controls.size(); ++j) {
      w(k, static_cast<Eigen::Index>(j)) =
          trace_inner(lambda[idx], controls[j].op * traj.forward()[idx]);
    }
  }
  return w;
}

}  // namespace

AmplitudeMatrix gradient_su_first_order(const PulseSequence& seq, const SpinSystem& sys,
                                        const TargetGate& target) {
  const Trajectory traj(sys, seq);
  const Eigen::MatrixXcd w = adjoint_overlaps(traj, traj.backward(target.phased_matrix()), sys);
  AmplitudeMatrix g(w.rows(), w.cols());
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    const double dt = seq.durations[static_cast<std::size_t>(k)];
    g.row(k) = -dt * w.row(k).imag() / static_cast<double>(target.dim());
  }
  return g;
}

AmplitudeMatrix gradient_psu_first_order(const PulseSequence& seq, const SpinSystem& sys,
                                         const TargetGate& target) {
  const Trajectory traj(sys, seq);
  const Eigen::MatrixXcd w = adjoint_overlaps(traj, traj.backward(target.matrix), sys);
  const Complex z = trace_inner(target.matrix, traj.final_propagator());
  const auto dim = static_cast<double>(target.dim());
  AmplitudeMatrix g(w.rows(), w.cols());
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    const double dt = seq.durations[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      g(k, j) = 2.0 * dt * std::imag(z * std::conj(w(k, j))) / (dim * dim);
    }
  }
  return g;
}

double simulate_fidelity(const PulseSequence& seq, const SpinSystem& sys, const TargetGate& target,
                         const Functional& f) {
  return trace_fidelity(Trajectory(sys, seq).final_propagator(), target, f);
}

// ---------------------------------------------------------------------------
// Optimization

std::string_view to_string(AscentDirection d) {
  return d == AscentDirection::Steepest ? "steepest" : "conjugate";
}

AscentDirection parse_ascent_direction(std::string_view text) {
  if (text == "steepest") return AscentDirection::Steepest;
  if (text == "conjugate" || text == "cg") return AscentDirection::ConjugateGradient;
  throw std::invalid_argument("unknown ascent direction '" + std::string(text) + "'");
}

void OptimizationConfig::validate() const {
  if (!(fidelity_target > 0.0 && fidelity_target <= 1.0)) {
    throw std::invalid_argument("fidelity target must lie in (0, 1]");
  }
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(line_search.backtrack_factor > 0.0 && line_search.backtrack_factor < 1.0)) {
    throw std::invalid_argument("backtrack factor must lie in (0, 1)");
  }
  if (!(line_search.growth_factor >= 1.0)) {
    throw std::invalid_argument("growth factor must be >= 1");
  }
  if (line_search.max_trials < 1) throw std::invalid_argument("max line-search trials must be >= 1");
  if (!(init_fraction >= 0.0 && init_fraction <= 1.0)) {
    throw std::invalid_argument("init fraction must lie in [0, 1]");
  }
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

std::uint64_t restart_seed(std::uint64_t seed, int index) {
  // splitmix64 finalizer over (seed, index).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PulseSequence random_sequence(const SpinSystem& sys, double T, int slices, double init_fraction,
                              std::uint64_t seed) {
  PulseSequence seq = PulseSequence::uniform(T, slices, static_cast<int>(sys.channel_count()));
  const double half_width = init_fraction * sys.amplitude_bound();
  if (half_width > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-half_width, half_width);
    for (Eigen::Index i = 0; i < seq.amplitudes.size(); ++i) seq.amplitudes.data()[i] = dist(rng);
  }
  return seq;
}

namespace {

struct Iterate {
  PulseSequence seq;
  Trajectory traj;
  Complex overlap;
  double value;
};

Iterate evaluate(const SpinSystem& sys, const Objective& obj, PulseSequence seq) {
  Trajectory traj(sys, seq);
  const Complex z = obj.overlap(traj.final_propagator());
  return {std::move(seq), std::move(traj), z, obj.value(z)};
}

/// Zeroes gradient components that point out of the amplitude box.
AmplitudeMatrix project(const AmplitudeMatrix& g, const AmplitudeMatrix& u, double bound) {
  AmplitudeMatrix p = g;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double ui = u.data()[i];
    double& gi = p.data()[i];
    if ((ui >= bound && gi > 0.0) || (ui <= -bound && gi < 0.0)) gi = 0.0;
  }
  return p;
}


/// Backtracking from `alpha` until the objective improves; on immediate
/// success the step keeps doubling while it improves, and a parabola through
/// the last three trials proposes a final refinement. `alpha` returns the
/// accepted step times the growth factor.
std::optional<Iterate> line_search(const SpinSystem& sys, const Objective& obj, const Iterate& cur,
                                   const AmplitudeMatrix& dir, double& alpha, double bound,
                                   const LineSearchPolicy& policy) {
  auto trial = [&](double step) {
    PulseSequence next = cur.seq;
    next.amplitudes = (cur.seq.amplitudes + step * dir).cwiseMax(-bound).cwiseMin(bound);
    return evaluate(sys, obj, std::move(next));
  };

  int trials = 0;
  std::optional<Iterate> best;
  double best_step = 0.0;
  while (trials < policy.max_trials) {
    Iterate cand = trial(alpha);
    ++trials;
    if (cand.value > cur.value) {
      best = std::move(cand);
      best_step = alpha;
      break;
    }
    alpha *= policy.backtrack_factor;
  }
  if (!best) return std::nullopt;

  if (trials == 1 && policy.growth_factor > 1.0) {
    // Expansion: (prev_step, prev_value) trails the best point.
    double prev_step = 0.0;
    double prev_value = cur.value;
    double next_step = best_step * policy.growth_factor;
    double next_value = best->value;
    while (trials < policy.max_trials) {
      Iterate cand = trial(next_step);
      ++trials;
      next_value = cand.value;
      if (cand.value <= best->value) break;
      prev_step = best_step;
      prev_value = best->value;
      best = std::move(cand);
      best_step = next_step;
      next_step *= policy.growth_factor;
    }
    // Vertex of the parabola through the bracketing triple.
    if (next_value <= best->value && trials < policy.max_trials) {
      const double a = prev_step, b = best_step, c = next_step;
      const double fa = prev_value, fb = best->value, fc = next_value;
      const double num = (b - a) * (b - a) * (fb - fc) - (b - c) * (b - c) * (fb - fa);
      const double den = (b - a) * (fb - fc) - (b - c) * (fb - fa);
      if (den != 0.0) {
        const double vertex = b - 0.5 * num / den;
        if (vertex > a && vertex < c && std::abs(vertex - b) > 1e-3 * b) {
          Iterate cand = trial(vertex);
          if (cand.value > best->value) {
            best = std::move(cand);
            best_step = vertex;
          }
        }
      }
    }
  }
  alpha = best_step * policy.growth_factor;
  return best;
}

}  // namespace

OptimizationResult ascend(const SpinSystem& sys, const TargetGate& target, PulseSequence initial,
                          const OptimizationConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const double bound = sys.amplitude_bound();
  initial.amplitudes = initial.amplitudes.cwiseMax(-bound).cwiseMin(bound);

  const Objective obj(target, config.functional);
  const std::vector<SparseOperator> controls = sparse_controls(sys);

  Iterate cur = evaluate(sys, obj, std::move(initial));
  OptimizationResult result;
  result.trace.push_back(obj.reported(cur.value));

  double alpha = config.line_search.initial_step;
  AmplitudeMatrix prev_grad;
  AmplitudeMatrix prev_dir;
  int iteration = 0;
  for (; iteration < config.max_iterations; ++iteration) {
    if (obj.reported(cur.value) >= config.fidelity_target) break;

    const AmplitudeMatrix grad =
        project(obj.gradient(cur.overlap, cur.traj.overlap_gradient(obj.phased_target, controls)),
                cur.seq.amplitudes, bound);
    if (grad.norm() < config.gradient_tolerance) break;

    AmplitudeMatrix dir = grad;
    if (config.direction == AscentDirection::ConjugateGradient && prev_grad.size() > 0) {
      // Polak-Ribiere with reset to steepest ascent.
      const double beta =
          std::max(0.0, grad.cwiseProduct(grad - prev_grad).sum() / prev_grad.squaredNorm());
      dir = grad + beta * prev_dir;
      if (dir.cwiseProduct(grad).sum() <= 0.0) dir = grad;
    }
    if (!(alpha > 0.0)) {
      alpha = 0.05 * bound / dir.cwiseAbs().maxCoeff();
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (auto found = line_search(sys, obj, cur, dir, alpha, bound, config.line_search)) {
        cur = std::move(*found);
        accepted = true;
      } else if (attempt == 0 && dir != grad) {
        // A stale conjugate direction gets one retry along the plain gradient.
        dir = grad;
        alpha = 0.05 * bound / dir.cwiseAbs().maxCoeff();
      }
    }
    if (!accepted) break;

    prev_grad = grad;
    prev_dir = dir;
    result.trace.push_back(obj.reported(cur.value));
  }

  result.fidelity = obj.reported(cur.value);
  result.converged = result.fidelity >= config.fidelity_target;
  result.iterations = iteration;
  result.sequence = std::move(cur.seq);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

OptimizationResult optimize(const SpinSystem& sys, const TargetGate& target, double T, int slices,
                            const OptimizationConfig& config, const PulseSequence* warm_start) {
  config.validate();
  if (!(T > 0.0) || slices < 1) {
    throw std::invalid_argument("optimize: need T > 0 and at least one slice");
  }
  if (target.dim() != sys.dim()) {
    throw std::invalid_argument("optimize: target dimension does not match the spin system");
  }
  const auto start = std::chrono::steady_clock::now();

  auto initial_for = [&](int r) {
    if (r == 0 && warm_start != nullptr) {
      PulseSequence seq = warm_start->rescaled(T, slices);
      return seq;
    }
    return random_sequence(sys, T, slices, config.init_fraction, restart_seed(config.seed, r));
  };
  auto run = [&](int r) {
    OptimizationResult res = ascend(sys, target, initial_for(r), config);
    res.restart_index = r;
    res.seed = (r == 0 && warm_start != nullptr) ? 0 : restart_seed(config.seed, r);
    return res;
  };

  int threads = config.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency())
                                    : config.threads;
  threads = std::max(1, threads);

  OptimizationResult best;
  bool have_best = false;
  int considered = 0;
  bool done = false;
  for (int batch = 0; batch < config.restarts && !done; batch += threads) {
    const int count = std::min(threads, config.restarts - batch);
    std::vector<OptimizationResult> results;
    if (count == 1) {
      results.push_back(run(batch));
    } else {
      std::vector<std::future<OptimizationResult>> futures;
      for (int i = 0; i < count; ++i) {
        futures.push_back(std::async(std::launch::async, run, batch + i));
      }
      for (auto& f : futures) results.push_back(f.get());
    }
    // Reduce in restart order so the outcome does not depend on batching.
    for (OptimizationResult& res : results) {
      ++considered;
      if (!have_best || res.fidelity > best.fidelity) {
        best = std::move(res);
        have_best = true;
      }
      if (config.stop_at_first_success && best.converged) {
        done = true;
        break;
      }
    }
  }
  best.restarts_run = considered;
  best.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace pulsesynth
