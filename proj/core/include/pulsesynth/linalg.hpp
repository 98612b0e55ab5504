#pragma once

#include <complex>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace pulsesynth {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Thrown when an operator fails a structural check (Hermiticity, shape).
class LinalgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Pauli matrices and identities.
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix identity(Eigen::Index dim);

/// Largest absolute entry.
double max_abs(const Matrix& m);

/// max |H - H^dagger|.
double hermiticity_error(const Matrix& h);

/// max |U^dagger U - 1|.
double unitarity_error(const Matrix& u);

/// Square matrix that is Hermitian to within 1e-12 relative to its largest
/// entry. The check runs once, at construction.
class HermitianOperator {
 public:
  static constexpr double kRelativeTolerance = 1e-12;

  HermitianOperator() = default;
  explicit HermitianOperator(Matrix m);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

struct UnitaryPropagator {
  Matrix matrix;
  double duration = 0.0;
};

/// Kronecker product; (A (x) B)[i*p + k, j*q + l] = A[i,j] * B[k,l].
Matrix kron(const Matrix& a, const Matrix& b);

/// Lifts `op` to an n-qubit operator acting on `qubits` (in the listed order)
/// and as identity elsewhere. Qubit 0 is the most significant bit of the
/// computational-basis index.
Matrix embed(const Matrix& op, std::span<const int> qubits, int n);

/// exp(-i H t) and its directional derivatives, from one eigendecomposition
/// H = W diag(lambda) W^dagger.
///
/// The Frechet derivative in direction V is
///   W (Gamma o (W^dagger V W)) W^dagger,
///   Gamma_ab = (e^{-i l_a t} - e^{-i l_b t}) / (l_a - l_b),
/// evaluated as -2i e^{-i (l_a + l_b) t / 2} sin((l_a - l_b) t / 2) / (l_a - l_b)
/// to avoid cancellation, and replaced by its first-order limit
/// -i t e^{-i (l_a + l_b) t / 2} when |l_a - l_b| t < kDegeneracyThreshold.
class SpectralExponential {
 public:
  static constexpr double kDegeneracyThreshold = 1e-8;

  SpectralExponential(const HermitianOperator& h, double t);

  const Matrix& propagator() const { return propagator_; }
  const Matrix& eigenvectors() const { return vectors_; }
  const RealVector& eigenvalues() const { return values_; }
  const Matrix& kernel() const { return kernel_; }
  double time() const { return t_; }

  /// d/du exp(-i (H + u V) t) at u = 0.
  Matrix frechet(const Matrix& v) const;

 private:
  double t_;
  RealVector values_;
  Matrix vectors_;
  Matrix propagator_;
  Matrix kernel_;
};

UnitaryPropagator expm_i(const HermitianOperator& h, double t);

Matrix dexpm_i(const HermitianOperator& h, const HermitianOperator& v, double t);

/// tr(A^dagger B).
Complex trace_inner(const Matrix& a, const Matrix& b);

}  // namespace pulsesynth
