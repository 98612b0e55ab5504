#include "pulsesynth/selftest.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pulsesynth/gates.hpp"
#include "pulsesynth/grape.hpp"
#include "pulsesynth/spin_system.hpp"

namespace pulsesynth {

Matrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(dim, dim);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

Matrix random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix z(dim, dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  return q;
}

namespace {

CheckResult finish(CheckResult r) {
  r.passed = r.worst <= r.tolerance;
  return r;
}

TargetGate random_target(int n, std::mt19937_64& rng) {
  TargetGate g;
  g.name = "random";
  g.n = n;
  g.matrix = random_unitary(Eigen::Index{1} << n, rng);
  return g;
}

double fd_error(const AmplitudeMatrix& exact, const PulseSequence& seq,
                const std::function<double(const PulseSequence&)>& f) {
  constexpr double eps = 1e-6;
  AmplitudeMatrix fd(exact.rows(), exact.cols());
  PulseSequence probe = seq;
  for (Eigen::Index i = 0; i < fd.size(); ++i) {
    const double u = seq.amplitudes.data()[i];
    probe.amplitudes.data()[i] = u + eps;
    const double up = f(probe);
    probe.amplitudes.data()[i] = u - eps;
    const double down = f(probe);
    probe.amplitudes.data()[i] = u;
    fd.data()[i] = (up - down) / (2.0 * eps);
  }
  return (exact - fd).norm() / std::max(fd.norm(), 1e-300);
}

}  // namespace

CheckResult check_gradients(int problems, std::uint64_t seed, double tolerance) {
  CheckResult r{"gradient-vs-finite-difference", false, 0.0, tolerance, 0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kQubits[] = {1, 2, 3};
  constexpr int kSlices[] = {1, 5, 20};
  for (int p = 0; p < problems; ++p) {
    const int n = kQubits[p % 3];
    const int m = kSlices[(p / 3) % 3];
    const SpinSystem sys(n == 1 ? CouplingGraph::uncoupled(1) : make_topology(TopologyKind::Chain, n));
    PulseSequence seq =
        random_sequence(sys, 0.2 + 1.8 * unit(rng), m, 0.1, static_cast<std::uint64_t>(rng()));
    const TargetGate plain = random_target(n, rng);
    const TargetGate phased =
        plain.with_phase_mode(PhaseMode::fixed(2.0 * std::numbers::pi * unit(rng)));

    const double su = fd_error(gradient_su(seq, sys, phased), seq, [&](const PulseSequence& s) {
      return fidelity_su(forward_propagate(s, sys).back(), phased);
    });
    const double psu = fd_error(gradient_psu(seq, sys, plain), seq, [&](const PulseSequence& s) {
      return fidelity_psu(forward_propagate(s, sys).back(), plain);
    });
    r.worst = std::max({r.worst, su, psu});
    r.cases += 2;
  }
  return finish(r);
}

CheckResult check_unitarity(int samples, std::uint64_t seed, double tolerance) {
  CheckResult r{"unitarity", false, 0.0, tolerance, 0, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  for (int s = 0; s < samples; ++s) {
    const int n = 1 + s % 4;
    const HermitianOperator h(random_hermitian(Eigen::Index{1} << n, rng));
    const double t1 = time(rng);
    const double t2 = time(rng);
    const Matrix u1 = expm_i(h, t1).matrix;
    const Matrix u2 = expm_i(h, t2).matrix;
    const Matrix u12 = expm_i(h, t1 + t2).matrix;
    r.worst = std::max({r.worst, unitarity_error(u1), unitarity_error(u12),
                        max_abs(u1 * u2 - u12)});
    ++r.cases;
  }
  // Full trajectories at the default amplitude bound.
  for (int n = 1; n <= 3; ++n) {
    const SpinSystem sys(n == 1 ? CouplingGraph::uncoupled(1) : make_topology(TopologyKind::Complete, n));
    const PulseSequence seq = random_sequence(sys, 2.0, 80, 1.0, static_cast<std::uint64_t>(rng()));
    for (const Matrix& u : forward_propagate(seq, sys)) r.worst = std::max(r.worst, unitarity_error(u));
    ++r.cases;
  }
  return finish(r);
}

CheckResult check_ising_phase_identity(double tolerance) {
  CheckResult r{"ising-global-phase-identity", false, 0.0, tolerance, 1, ""};
  using std::numbers::pi;
  const Matrix z = pauli_z();
  const Matrix i2 = identity(2);
  const HermitianOperator coupling(kron(z, z));
  const HermitianOperator local(kron(z, i2) + kron(i2, z));
  const Matrix lhs = expm_i(coupling, pi / 2).matrix;
  const Matrix rhs = std::polar(1.0, pi / 2) * expm_i(local, pi / 2).matrix;
  r.worst = max_abs(lhs - rhs);
  return finish(r);
}

CheckResult check_doubled_system_identity(int samples, std::uint64_t seed, double tolerance) {
  CheckResult r{"doubled-system-identity", false, 0.0, tolerance, 0, ""};
  std::mt19937_64 rng(seed);
  for (int n = 1; n <= 3; ++n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    for (int s = 0; s < samples; ++s) {
      TargetGate g = random_target(n, rng);
      const Matrix u = random_unitary(dim, rng);
      const double phi2 = fidelity_psu(u, g);
      const Matrix big_g = kron(g.matrix.conjugate(), g.matrix);
      const Matrix big_u = kron(u.conjugate(), u);
      const double phi1 = trace_inner(big_g, big_u).real() / static_cast<double>(dim * dim);
      r.worst = std::max(r.worst, std::abs(phi2 - phi1));
      ++r.cases;
    }
  }
  return finish(r);
}

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
  return {
      check_gradients(options.gradient_problems, options.seed),
      check_unitarity(options.unitary_samples, options.seed + 1),
      check_ising_phase_identity(),
      check_doubled_system_identity(options.unitary_samples, options.seed + 2),
  };
}

void write_check(std::ostream& os, const CheckResult& result) {
  std::ostringstream line;
  line << (result.passed ? "PASS " : "FAIL ") << result.name << " worst=" << result.worst
       << " tol=" << result.tolerance << " (" << result.cases << " cases)";
  if (!result.detail.empty()) line << " " << result.detail;
  os << line.str() << "\n";
}

}  // namespace pulsesynth
