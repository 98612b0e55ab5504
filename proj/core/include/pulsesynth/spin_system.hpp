#pragma once

#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pulsesynth/linalg.hpp"

namespace pulsesynth {

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TopologyKind { Chain, Complete, Cycle, Star, Custom };

std::string_view to_string(TopologyKind kind);
TopologyKind parse_topology_kind(std::string_view text);

/// Ising coupling between qubits `a` < `b`, in units of the reference J.
struct Edge {
  int a = 0;
  int b = 0;
  double J = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted undirected coupling graph. Always free of self-loops and
/// duplicate edges; connected unless built through `uncoupled`.
class CouplingGraph {
 public:
  /// Validates and canonicalizes (a < b, sorted). Throws TopologyError on
  /// out-of-range indices, self-loops, duplicates, or a disconnected graph.
  CouplingGraph(int n, std::vector<Edge> edges, TopologyKind kind = TopologyKind::Custom);

  /// n qubits and no couplings. Not controllable for n > 1; meant for
  /// decoupled test systems.
  static CouplingGraph uncoupled(int n);

  int qubits() const { return n_; }
  TopologyKind kind() const { return kind_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool connected() const;

 private:
  CouplingGraph() = default;

  int n_ = 0;
  TopologyKind kind_ = TopologyKind::Custom;
  std::vector<Edge> edges_;
};

/// Edge pattern of a built-in topology with uniform coupling J:
/// chain (l, l+1); complete all pairs; cycle chain plus (0, n-1);
/// star (0, m) for m > 0.
CouplingGraph make_topology(TopologyKind kind, int n, double J = 1.0);

/// Built-in topology with per-edge couplings listed in the canonical
/// (sorted) edge order of the uniform graph.
CouplingGraph make_topology(TopologyKind kind, int n, std::span<const double> couplings);

/// Custom edge list.
CouplingGraph make_topology(int n, std::vector<Edge> edges);

/// H_d = pi * sum_{l<m} J_lm (1/2) Z_l Z_m.
Matrix drift_hamiltonian(const CouplingGraph& graph);

enum class Axis { X, Y };

struct ControlChannel {
  int qubit = 0;
  Axis axis = Axis::X;
  Matrix op;  // (1/2) sigma_axis on `qubit`
};

/// (1/2) sigma_x and (1/2) sigma_y for every qubit, ordered q0x, q0y, q1x, ...
std::vector<ControlChannel> control_hamiltonians(int n);

/// Default control amplitude bound: 50 * 2 pi in units of J (rad per 1/J).
inline constexpr double kDefaultAmplitudeBound = 50.0 * 2.0 * std::numbers::pi;

class SpinSystem {
 public:
  explicit SpinSystem(CouplingGraph graph, double amplitude_bound = kDefaultAmplitudeBound);

  const CouplingGraph& graph() const { return graph_; }
  int qubits() const { return graph_.qubits(); }
  Eigen::Index dim() const { return Eigen::Index{1} << qubits(); }
  const Matrix& drift() const { return drift_; }
  const std::vector<ControlChannel>& controls() const { return controls_; }
  std::size_t channel_count() const { return controls_.size(); }
  double amplitude_bound() const { return amplitude_bound_; }

  /// H_d + sum_j u_j H_j.
  HermitianOperator hamiltonian(std::span<const double> amplitudes) const;

 private:
  CouplingGraph graph_;
  Matrix drift_;
  std::vector<ControlChannel> controls_;
  double amplitude_bound_;
};

/// Dimension of the real Lie algebra generated by {i G} under commutators.
/// Equals dim su(N) = N^2 - 1 for a fully controllable traceless set.
int lie_closure_dimension(std::span<const Matrix> generators, double tolerance = 1e-9);

}  // namespace pulsesynth
