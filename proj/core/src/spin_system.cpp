#include "pulsesynth/spin_system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

namespace pulsesynth {

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Chain: return "chain";
    case TopologyKind::Complete: return "complete";
    case TopologyKind::Cycle: return "cycle";
    case TopologyKind::Star: return "star";
    case TopologyKind::Custom: return "custom";
  }
  return "custom";
}

TopologyKind parse_topology_kind(std::string_view text) {
  if (text == "chain" || text == "L") return TopologyKind::Chain;
  if (text == "complete" || text == "K") return TopologyKind::Complete;
  if (text == "cycle" || text == "ring") return TopologyKind::Cycle;
  if (text == "star") return TopologyKind::Star;
  if (text == "custom") return TopologyKind::Custom;
  throw TopologyError("unknown topology '" + std::string(text) + "'");
}

CouplingGraph::CouplingGraph(int n, std::vector<Edge> edges, TopologyKind kind)
    : n_(n), kind_(kind), edges_(std::move(edges)) {
  if (n_ < 1) {
    throw TopologyError("coupling graph needs at least one qubit");
  }
  if (n_ < 2 && !edges_.empty()) {
    throw TopologyError("couplings requested on fewer than two qubits");
  }
  for (Edge& e : edges_) {
    if (e.a < 0 || e.a >= n_ || e.b < 0 || e.b >= n_) {
      throw TopologyError("edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                          ") out of range");
    }
    if (e.a == e.b) {
      throw TopologyError("self-loop on qubit " + std::to_string(e.a));
    }
    if (!std::isfinite(e.J)) {
      throw TopologyError("non-finite coupling");
    }
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].a == edges_[i - 1].a && edges_[i].b == edges_[i - 1].b) {
      throw TopologyError("duplicate edge (" + std::to_string(edges_[i].a) + ", " +
                          std::to_string(edges_[i].b) + ")");
    }
  }
  if (!connected()) {
    throw TopologyError("coupling graph is disconnected");
  }
}

CouplingGraph CouplingGraph::uncoupled(int n) {
  if (n < 1) {
    throw TopologyError("coupling graph needs at least one qubit");
  }
  CouplingGraph g;
  g.n_ = n;
  return g;
}

bool CouplingGraph::connected() const {
  std::vector<int> parent(static_cast<std::size_t>(n_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  int components = n_;
  for (const Edge& e : edges_) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components == 1;
}

namespace {

std::vector<Edge> uniform_edges(TopologyKind kind, int n, double J) {
  std::vector<Edge> edges;
  switch (kind) {
    case TopologyKind::Chain:
      for (int l = 0; l + 1 < n; ++l) edges.push_back({l, l + 1, J});
      break;
    case TopologyKind::Complete:
      for (int l = 0; l < n; ++l)
        for (int m = l + 1; m < n; ++m) edges.push_back({l, m, J});
      break;
    case TopologyKind::Cycle:
      for (int l = 0; l + 1 < n; ++l) edges.push_back({l, l + 1, J});
      if (n > 2) edges.push_back({0, n - 1, J});
      break;
    case TopologyKind::Star:
      for (int m = 1; m < n; ++m) edges.push_back({0, m, J});
      break;
    case TopologyKind::Custom:
      throw TopologyError("custom topology needs an explicit edge list");
  }
  return edges;
}

}  // namespace

CouplingGraph make_topology(TopologyKind kind, int n, double J) {
  if (n < 1) {
    throw TopologyError("topology needs at least one qubit");
  }
  return CouplingGraph(n, uniform_edges(kind, n, J), kind);
}

CouplingGraph make_topology(TopologyKind kind, int n, std::span<const double> couplings) {
  CouplingGraph uniform = make_topology(kind, n, 1.0);
  std::vector<Edge> edges = uniform.edges();
  if (couplings.size() != edges.size()) {
    throw TopologyError("expected " + std::to_string(edges.size()) + " couplings for " +
                        std::string(to_string(kind)) + " on " + std::to_string(n) +
                        " qubits, got " + std::to_string(couplings.size()));
  }
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].J = couplings[i];
  return CouplingGraph(n, std::move(edges), kind);
}

CouplingGraph make_topology(int n, std::vector<Edge> edges) {
  return CouplingGraph(n, std::move(edges), TopologyKind::Custom);
}

Matrix drift_hamiltonian(const CouplingGraph& graph) {
  const int n = graph.qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  for (const Edge& e : graph.edges()) {
    const double weight = std::numbers::pi * e.J * 0.5;
    for (Eigen::Index s = 0; s < dim; ++s) {
      const int za = ((s >> (n - 1 - e.a)) & 1) ? -1 : 1;
      const int zb = ((s >> (n - 1 - e.b)) & 1) ? -1 : 1;
      h(s, s) += weight * za * zb;
    }
  }
  return h;
}

std::vector<ControlChannel> control_hamiltonians(int n) {
  if (n < 1) {
    throw TopologyError("control_hamiltonians: need at least one qubit");
  }
  std::vector<ControlChannel> out;
  out.reserve(static_cast<std::size_t>(2 * n));
  const Matrix half_x = 0.5 * pauli_x();
  const Matrix half_y = 0.5 * pauli_y();
  for (int q = 0; q < n; ++q) {
    const std::array<int, 1> where{q};
    out.push_back({q, Axis::X, embed(half_x, where, n)});
    out.push_back({q, Axis::Y, embed(half_y, where, n)});
  }
  return out;
}

SpinSystem::SpinSystem(CouplingGraph graph, double amplitude_bound)
    : graph_(std::move(graph)),
      drift_(drift_hamiltonian(graph_)),
      controls_(control_hamiltonians(graph_.qubits())),
      amplitude_bound_(amplitude_bound) {
  if (!(amplitude_bound_ > 0.0)) {
    throw std::invalid_argument("SpinSystem: amplitude bound must be positive");
  }
}

HermitianOperator SpinSystem::hamiltonian(std::span<const double> amplitudes) const {
  if (amplitudes.size() != controls_.size()) {
    throw std::invalid_argument("SpinSystem::hamiltonian: wrong number of amplitudes");
  }
  Matrix h = drift_;
  for (std::size_t j = 0; j < controls_.size(); ++j) {
    h += amplitudes[j] * controls_[j].op;
  }
  return HermitianOperator(std::move(h));
}

int lie_closure_dimension(std::span<const Matrix> generators, double tolerance) {
  // Work with the real vector space spanned by the anti-Hermitian i*G.
  // The Frobenius inner product Re tr(A^dagger B) is real on this space.
  std::vector<Matrix> basis;
  auto add = [&](Matrix candidate) {
    // Two Gram-Schmidt passes keep the basis orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& b : basis) {
        candidate -= trace_inner(b, candidate).real() * b;
      }
    }
    const double norm = candidate.norm();
    if (norm <= tolerance) return false;
    basis.push_back(candidate / norm);
    return true;
  };

  std::vector<Matrix> frontier;
  std::vector<Matrix> gens;
  for (const Matrix& g : generators) {
    Matrix ig = Complex{0.0, 1.0} * g;
    gens.push_back(ig);
    if (add(ig)) frontier.push_back(basis.back());
  }
  while (!frontier.empty()) {
    std::vector<Matrix> next;
    for (const Matrix& x : frontier) {
      for (const Matrix& g : gens) {
        if (add(g * x - x * g)) next.push_back(basis.back());
      }
    }
    frontier = std::move(next);
  }
  return static_cast<int>(basis.size());
}

}  // namespace pulsesynth
