#include "pulsesynth/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace pulsesynth {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw LinalgError(std::string(what) + ": matrix is not square");
  }
}

}  // namespace

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_error(const Matrix& h) {
  require_square(h, "hermiticity_error");
  return max_abs(h - h.adjoint());
}

double unitarity_error(const Matrix& u) {
  require_square(u, "unitarity_error");
  return max_abs(u.adjoint() * u - identity(u.rows()));
}

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
  require_square(m_, "HermitianOperator");
  const double scale = max_abs(m_);
  if (hermiticity_error(m_) > kRelativeTolerance * scale) {
    throw LinalgError("HermitianOperator: matrix is not Hermitian");
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix embed(const Matrix& op, std::span<const int> qubits, int n) {
  require_square(op, "embed");
  if (n < 1 || n > 30) {
    throw LinalgError("embed: qubit count out of range");
  }
  const auto k = static_cast<int>(qubits.size());
  if (op.rows() != (Eigen::Index{1} << k)) {
    throw LinalgError("embed: operator dimension does not match qubit list");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  Eigen::Index mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= n) {
      throw LinalgError("embed: qubit index " + std::to_string(q) + " out of range");
    }
    if (seen[static_cast<std::size_t>(q)]) {
      throw LinalgError("embed: duplicate qubit index " + std::to_string(q));
    }
    seen[static_cast<std::size_t>(q)] = true;
    mask |= Eigen::Index{1} << (n - 1 - q);
  }

  const Eigen::Index dim = Eigen::Index{1} << n;
  // Sub-index of a full basis index: bits of the listed qubits, first listed
  // qubit most significant.
  auto sub_index = [&](Eigen::Index full) {
    Eigen::Index s = 0;
    for (int q : qubits) {
      s = (s << 1) | ((full >> (n - 1 - q)) & 1);
    }
    return s;
  };

  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const Eigen::Index sr = sub_index(r);
    const Eigen::Index rest = r & ~mask;
    for (Eigen::Index sc = 0; sc < op.cols(); ++sc) {
      const Complex v = op(sr, sc);
      if (v == Complex{}) continue;
      // Scatter the sub-index bits of sc back into the listed positions.
      Eigen::Index c = rest;
      for (int i = 0; i < k; ++i) {
        const Eigen::Index bit = (sc >> (k - 1 - i)) & 1;
        c |= bit << (n - 1 - qubits[static_cast<std::size_t>(i)]);
      }
      out(r, c) = v;
    }
  }
  return out;
}

SpectralExponential::SpectralExponential(const HermitianOperator& h, double t) : t_(t) {
  const Eigen::Index dim = h.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw LinalgError("SpectralExponential: eigendecomposition failed");
  }
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();

  // half(a) = e^{-i l_a t / 2}; both the propagator phases and the kernel
  // entries are products of these, so only dim exponentials are needed.
  Eigen::VectorXcd half(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    half(a) = std::exp(-kI * (0.5 * values_(a) * t));
  }
  const Eigen::VectorXcd phases = half.cwiseProduct(half);
  propagator_ = vectors_ * phases.asDiagonal() * vectors_.adjoint();

  kernel_.resize(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      const double gap = values_(a) - values_(b);
      const Complex mid = half(a) * half(b);
      const double x = 0.5 * gap * t;
      if (std::abs(gap) * std::abs(t) < kDegeneracyThreshold) {
        kernel_(a, b) = -kI * t * mid;
      } else {
        // sin(x) = Im(conj(half(a)) half(b)) away from tiny arguments.
        const double s = std::abs(x) < 1e-3 ? std::sin(x) : (std::conj(half(a)) * half(b)).imag();
        kernel_(a, b) = -2.0 * kI * mid * (s / gap);
      }
    }
  }
}

Matrix SpectralExponential::frechet(const Matrix& v) const {
  const Matrix rotated = vectors_.adjoint() * v * vectors_;
  return vectors_ * kernel_.cwiseProduct(rotated) * vectors_.adjoint();
}

UnitaryPropagator expm_i(const HermitianOperator& h, double t) {
  SpectralExponential e(h, t);
  return {e.propagator(), t};
}

Matrix dexpm_i(const HermitianOperator& h, const HermitianOperator& v, double t) {
  if (h.dim() != v.dim()) {
    throw LinalgError("dexpm_i: dimension mismatch");
  }
  return SpectralExponential(h, t).frechet(v.matrix());
}

Complex trace_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw LinalgError("trace_inner: dimension mismatch");
  }
  return a.conjugate().cwiseProduct(b).sum();
}

}  // namespace pulsesynth
