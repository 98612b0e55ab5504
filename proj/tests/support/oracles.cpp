#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace oracle {

Matrix kron_by_index(const Matrix& a, const Matrix& b) {
  const auto p = b.rows();
  const auto q = b.cols();
  Matrix out(a.rows() * p, a.cols() * q);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index l = 0; l < q; ++l) out(i * p + k, j * q + l) = a(i, j) * b(k, l);
  return out;
}

Matrix embed_by_bits(const Matrix& op, const std::vector<int>& qubits, int n) {
  const int dim = 1 << n;
  auto bit = [n](int state, int qubit) { return (state >> (n - 1 - qubit)) & 1; };
  // Sub-index of the addressed qubits; the first listed qubit is the MSB.
  auto sub = [&](int state) {
    int s = 0;
    for (int q : qubits) s = (s << 1) | bit(state, q);
    return s;
  };
  auto rest_equal = [&](int r, int c) {
    for (int q = 0; q < n; ++q) {
      if (std::find(qubits.begin(), qubits.end(), q) != qubits.end()) continue;
      if (bit(r, q) != bit(c, q)) return false;
    }
    return true;
  };
  Matrix out = Matrix::Zero(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (rest_equal(r, c)) out(r, c) = op(sub(r), sub(c));
  return out;
}

Matrix expm_taylor(const Matrix& h, double t) {
  const Matrix a = Complex(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Matrix scaled = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(h.rows(), h.cols());
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

double central_difference(const std::function<double(double)>& f, double x, double eps) {
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

std::vector<double> ising_drift_diagonal(int n,
                                         const std::vector<std::tuple<int, int, double>>& edges) {
  const int dim = 1 << n;
  std::vector<double> diag(static_cast<std::size_t>(dim), 0.0);
  for (int s = 0; s < dim; ++s) {
    for (const auto& [a, b, J] : edges) {
      const int za = ((s >> (n - 1 - a)) & 1) ? -1 : 1;
      const int zb = ((s >> (n - 1 - b)) & 1) ? -1 : 1;
      diag[static_cast<std::size_t>(s)] += M_PI * J * 0.5 * za * zb;
    }
  }
  return diag;
}

namespace {

Eigen::VectorXd realify(const Matrix& m) {
  Eigen::VectorXd v(2 * m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    v(2 * i) = m.data()[i].real();
    v(2 * i + 1) = m.data()[i].imag();
  }
  return v;
}

int rank_of(const std::vector<Matrix>& basis) {
  if (basis.empty()) return 0;
  Eigen::MatrixXd cols(2 * basis[0].size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = realify(basis[k]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cols);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

}  // namespace

int lie_rank(const std::vector<Matrix>& generators, int max_depth) {
  std::vector<Matrix> span;
  for (const Matrix& g : generators) {
    span.push_back(Complex(0.0, 1.0) * g);
    if (rank_of(span) < static_cast<int>(span.size())) span.pop_back();
  }
  std::vector<Matrix> layer = span;
  for (int depth = 0; depth < max_depth && !layer.empty(); ++depth) {
    std::vector<Matrix> next;
    for (const Matrix& x : layer) {
      for (const Matrix& g : generators) {
        const Matrix ig = Complex(0.0, 1.0) * g;
        Matrix c = x * ig - ig * x;
        if (c.cwiseAbs().maxCoeff() < 1e-12) continue;
        c /= c.norm();
        span.push_back(c);
        if (rank_of(span) < static_cast<int>(span.size())) {
          span.pop_back();
        } else {
          next.push_back(c);
        }
      }
    }
    layer = std::move(next);
  }
  return static_cast<int>(span.size());
}

Matrix propagate_naive(const std::vector<Matrix>& hamiltonians, const std::vector<double>& dts) {
  Matrix u = Matrix::Identity(hamiltonians.at(0).rows(), hamiltonians.at(0).cols());
  for (std::size_t k = 0; k < hamiltonians.size(); ++k) u = expm_taylor(hamiltonians[k], dts[k]) * u;
  return u;
}

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(d(rng), d(rng));
  return a + a.adjoint();
}

Matrix random_unitary(int dim, std::mt19937_64& rng) {
  return expm_taylor(random_hermitian(dim, rng), 2.0);
}

Matrix qubit_permutation(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  const int dim = 1 << n;
  Matrix p = Matrix::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    int t = 0;
    for (int q = 0; q < n; ++q) {
      const int b = (s >> (n - 1 - q)) & 1;
      t |= b << (n - 1 - perm[static_cast<std::size_t>(q)]);
    }
    p(t, s) = 1.0;
  }
  return p;
}

}  // namespace oracle
