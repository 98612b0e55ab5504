#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "pulsesynth/linalg.hpp"

namespace pulsesynth {

/// Outcome of one invariant suite. `worst` is the largest observed error,
/// compared against `tolerance`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  int cases = 0;
  std::string detail;
};

// Random test inputs.
Matrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng);
/// Haar-distributed unitary (QR of a complex Ginibre matrix with the phase
/// of R's diagonal divided out).
Matrix random_unitary(Eigen::Index dim, std::mt19937_64& rng);

/// Exact gradients against central finite differences of the fidelities
/// (step 1e-6, norm-wise relative error) on random problems with
/// n in {1,2,3} and M in {1,5,20}.
CheckResult check_gradients(int problems, std::uint64_t seed, double tolerance = 1e-6);

/// expm_i outputs and forward trajectories are unitary; exp(-iHt1)exp(-iHt2)
/// equals exp(-iH(t1+t2)).
CheckResult check_unitarity(int samples, std::uint64_t seed, double tolerance = 1e-10);

/// exp(-i pi/2 Z(x)Z) = e^{i pi/2} exp(-i pi/2 (Z(x)1 + 1(x)Z)): the coupling
/// evolution differs from purely local evolution by a global phase only.
CheckResult check_ising_phase_identity(double tolerance = 1e-10);

/// |tr(U_G^dagger U)|^2 / N^2 equals Re tr(G^dagger W) / N^2 with
/// G = conj(U_G) (x) U_G and W = conj(U) (x) U, for N in {2,4,8}.
CheckResult check_doubled_system_identity(int samples, std::uint64_t seed,
                                          double tolerance = 1e-10);

struct SelftestOptions {
  std::uint64_t seed = 20240601;
  int gradient_problems = 50;
  int unitary_samples = 100;
};

std::vector<CheckResult> run_selftest(const SelftestOptions& options = {});

/// One line per check: "PASS name worst=... tol=... (cases)".
void write_check(std::ostream& os, const CheckResult& result);

}  // namespace pulsesynth
