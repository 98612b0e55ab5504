#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pulsesynth/linalg.hpp"
#include "support/oracles.hpp"

namespace ps = pulsesynth;
using ps::Complex;
using ps::Matrix;

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix diag(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex c : d) m(i, i) = c, ++i;
  return m;
}

}  // namespace

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_EQ(ps::max_abs(ps::kron(ps::identity(2), ps::identity(2)) - ps::identity(4)), 0.0);
}

TEST(Kron, ZZIsDiagonalParity) {
  EXPECT_EQ(ps::max_abs(ps::kron(ps::pauli_z(), ps::pauli_z()) - diag({1, -1, -1, 1})), 0.0);
}

TEST(Kron, MatchesIndexFormula) {
  EXPECT_EQ(ps::max_abs(ps::kron(ps::pauli_x(), ps::pauli_y()) -
                        oracle::kron_by_index(ps::pauli_x(), ps::pauli_y())),
            0.0);
  std::mt19937_64 rng(3);
  const Matrix a = oracle::random_hermitian(3, rng);
  const Matrix b = oracle::random_hermitian(2, rng).topLeftCorner(2, 1);
  const Matrix k = ps::kron(a, b);
  EXPECT_EQ(k.rows(), 6);
  EXPECT_EQ(k.cols(), 3);
  EXPECT_LT(ps::max_abs(k - oracle::kron_by_index(a, b)), 1e-15);
}

TEST(Embed, SingleQubitMostSignificantFirst) {
  const std::array q0{0};
  const std::array q1{1};
  EXPECT_EQ(ps::max_abs(ps::embed(ps::pauli_z(), q0, 2) - diag({1, 1, -1, -1})), 0.0);
  EXPECT_EQ(ps::max_abs(ps::embed(ps::pauli_z(), q1, 2) - diag({1, -1, 1, -1})), 0.0);
}

TEST(Embed, NonAdjacentPairMatchesBitWalk) {
  const std::array qs{0, 2};
  const Matrix xx = ps::kron(ps::pauli_x(), ps::pauli_x());
  EXPECT_EQ(ps::max_abs(ps::embed(xx, qs, 3) - oracle::embed_by_bits(xx, {0, 2}, 3)), 0.0);
  // Same thing through explicit identity factors: X (x) 1 (x) X.
  const Matrix direct = ps::kron(ps::kron(ps::pauli_x(), ps::identity(2)), ps::pauli_x());
  EXPECT_EQ(ps::max_abs(ps::embed(xx, qs, 3) - direct), 0.0);
}

TEST(Embed, ListedOrderIsRespected) {
  std::mt19937_64 rng(11);
  const Matrix op = oracle::random_hermitian(4, rng);
  for (const auto& qs : std::vector<std::vector<int>>{{2, 0}, {1, 3}, {3, 1}, {0, 3}}) {
    EXPECT_LT(ps::max_abs(ps::embed(op, qs, 4) - oracle::embed_by_bits(op, qs, 4)), 1e-15);
  }
}

TEST(Embed, RejectsBadQubitLists) {
  const Matrix z = ps::pauli_z();
  const std::array out_of_range{2};
  const std::array negative{-1};
  const std::array dup{1, 1};
  const std::array pair{0, 1};
  EXPECT_THROW(ps::embed(z, out_of_range, 2), ps::LinalgError);
  EXPECT_THROW(ps::embed(z, negative, 2), ps::LinalgError);
  EXPECT_THROW(ps::embed(ps::kron(z, z), dup, 2), ps::LinalgError);
  EXPECT_THROW(ps::embed(z, pair, 2), ps::LinalgError);
}

TEST(HermitianOperator, RejectsNonHermitian) {
  Matrix m = ps::pauli_x();
  m(0, 1) = 2.0;
  EXPECT_THROW(ps::HermitianOperator{m}, ps::LinalgError);
  EXPECT_THROW(ps::HermitianOperator{Matrix::Zero(2, 3)}, ps::LinalgError);
  EXPECT_NO_THROW(ps::HermitianOperator{ps::pauli_y()});
}

TEST(ExpmI, DiagonalCase) {
  const double theta = 0.7;
  const Matrix u = ps::expm_i(ps::HermitianOperator(ps::pauli_z()), theta).matrix;
  EXPECT_LT(ps::max_abs(u - diag({std::exp(-kI * theta), std::exp(kI * theta)})), 1e-15);
}

TEST(ExpmI, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(5);
  const ps::HermitianOperator h(oracle::random_hermitian(4, rng));
  EXPECT_LT(ps::max_abs(ps::expm_i(h, 0.0).matrix - ps::identity(4)), 1e-15);
}

TEST(ExpmI, IsingTermAsDirectDiagonal) {
  // (pi/2)(1/2) Z Z (2/pi) = (1/2) Z Z over t = pi/2: phases e^{-i pi/4 (+-1)}.
  const Matrix h = (std::numbers::pi / 2) * 0.5 * ps::kron(ps::pauli_z(), ps::pauli_z()) *
                   (2.0 / std::numbers::pi);
  const Matrix u = ps::expm_i(ps::HermitianOperator(h), std::numbers::pi / 2).matrix;
  const Complex m = std::exp(-kI * (std::numbers::pi / 4));
  EXPECT_LT(ps::max_abs(u - diag({m, std::conj(m), std::conj(m), m})), 1e-15);
}

TEST(ExpmI, MatchesTaylorOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(0.0, 3.0);
  for (int dim : {2, 4, 8, 16}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix h = oracle::random_hermitian(dim, rng);
      const double tt = t(rng);
      EXPECT_LT(ps::max_abs(ps::expm_i(ps::HermitianOperator(h), tt).matrix - oracle::expm_taylor(h, tt)),
                1e-11);
    }
  }
}

TEST(ExpmI, UnitaryAndGroupPropertyOnManyInputs) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> t(0.0, 10.0);
  double worst_unitary = 0.0;
  double worst_group = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const int dim = 1 << (1 + s % 4);
    const ps::HermitianOperator h(oracle::random_hermitian(dim, rng));
    const double t1 = t(rng);
    const double t2 = t(rng);
    const Matrix u1 = ps::expm_i(h, t1).matrix;
    worst_unitary = std::max(worst_unitary, ps::unitarity_error(u1));
    if (s % 10 == 0) {
      const Matrix u12 = ps::expm_i(h, t1 + t2).matrix;
      worst_group = std::max(worst_group, ps::max_abs(u1 * ps::expm_i(h, t2).matrix - u12));
    }
  }
  EXPECT_LT(worst_unitary, 1e-10);
  EXPECT_LT(worst_group, 1e-10);
}

TEST(DexpmI, ZeroDirectionGivesZero) {
  std::mt19937_64 rng(29);
  const ps::HermitianOperator h(oracle::random_hermitian(4, rng));
  const ps::HermitianOperator zero(Matrix::Zero(4, 4));
  EXPECT_EQ(ps::max_abs(ps::dexpm_i(h, zero, 1.3)), 0.0);
}

TEST(DexpmI, AtZeroHamiltonianIsMinusITV) {
  std::mt19937_64 rng(31);
  const Matrix v = oracle::random_hermitian(4, rng);
  const double t = 0.8;
  const Matrix d = ps::dexpm_i(ps::HermitianOperator(Matrix::Zero(4, 4)), ps::HermitianOperator(v), t);
  EXPECT_LT(ps::max_abs(d - (-kI * t) * v), 1e-14);
}

namespace {

double frechet_fd_error(const Matrix& h, const Matrix& v, double t) {
  constexpr double eps = 1e-6;
  const Matrix fd = (oracle::expm_taylor(h + eps * v, t) - oracle::expm_taylor(h - eps * v, t)) / (2 * eps);
  const Matrix d = ps::dexpm_i(ps::HermitianOperator(h), ps::HermitianOperator(v), t);
  return (d - fd).norm() / fd.norm();
}

}  // namespace

TEST(DexpmI, MatchesCentralDifferences) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> t(0.1, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix h = oracle::random_hermitian(4, rng);
    const Matrix v = oracle::random_hermitian(4, rng);
    EXPECT_LT(frechet_fd_error(h, v, t(rng)), 1e-6);
  }
}

TEST(DexpmI, DegenerateSpectraUseTaylorLimit) {
  std::mt19937_64 rng(41);
  const Matrix v = oracle::random_hermitian(4, rng);
  // Exactly degenerate: ZZ has two doubly degenerate eigenvalues.
  const Matrix zz = ps::kron(ps::pauli_z(), ps::pauli_z());
  EXPECT_LT(frechet_fd_error(zz, v, 1.1), 1e-6);
  // Nearly degenerate: split by 1e-10, far below the 1e-8 threshold.
  Matrix near = zz;
  near(0, 0) += 1e-10;
  EXPECT_LT(frechet_fd_error(near, v, 1.1), 1e-6);
  // A rotated degenerate spectrum, so the eigenbasis is not the standard one.
  const Matrix w = oracle::random_unitary(4, rng);
  EXPECT_LT(frechet_fd_error(w * zz * w.adjoint(), v, 0.9), 1e-6);
}

TEST(TraceInner, Basics) {
  EXPECT_EQ(ps::trace_inner(ps::identity(8), ps::identity(8)), Complex(8.0, 0.0));
  std::mt19937_64 rng(43);
  const Matrix u = oracle::random_unitary(4, rng);
  EXPECT_LT(std::abs(ps::trace_inner(u, u) - Complex(4.0, 0.0)), 1e-12);
}

TEST(TraceInner, ElementwiseOracleAndConjugateSymmetry) {
  std::mt19937_64 rng(47);
  const Matrix a = oracle::random_hermitian(4, rng) + kI * oracle::random_hermitian(4, rng);
  const Matrix b = oracle::random_hermitian(4, rng) * oracle::random_unitary(4, rng);
  Complex sum{};
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) sum += std::conj(a(i, j)) * b(i, j);
  EXPECT_LT(std::abs(ps::trace_inner(a, b) - sum), 1e-12);
  EXPECT_LT(std::abs(ps::trace_inner(a, b) - std::conj(ps::trace_inner(b, a))), 1e-12);
  EXPECT_THROW(ps::trace_inner(a, ps::identity(2)), ps::LinalgError);
}
