#include "tvcs/linops.hpp"

#include <string>

#include "tvcs/rng.hpp"

namespace tvcs {

GradientOperator::GradientOperator(Eigen::Index n) : n_(n) {
  if (n < 2) throw DimensionError("gradient operator needs n >= 2, got " + std::to_string(n));
}

Vector GradientOperator::apply(const Vector& x) const {
  if (x.size() != n_) {
    throw DimensionError("apply_gradient: expected length " + std::to_string(n_) + ", got " +
                         std::to_string(x.size()));
  }
  return x.tail(n_ - 1) - x.head(n_ - 1);
}

Vector GradientOperator::apply_adjoint(const Vector& z) const {
  if (z.size() != n_ - 1) {
    throw DimensionError("apply_gradient_adjoint: expected length " + std::to_string(n_ - 1) +
                         ", got " + std::to_string(z.size()));
  }
  // (D^T z)_j = z_{j-1} - z_j with z_0 = z_n = 0.
  Vector out(n_);
  out(0) = -z(0);
  for (Eigen::Index j = 1; j + 1 < n_; ++j) out(j) = z(j - 1) - z(j);
  out(n_ - 1) = z(n_ - 2);
  return out;
}

Matrix GradientOperator::materialize() const {
  Matrix d = Matrix::Zero(n_ - 1, n_);
  for (Eigen::Index i = 0; i + 1 < n_; ++i) {
    d(i, i) = -1.0;
    d(i, i + 1) = 1.0;
  }
  return d;
}

MeasurementEnsemble sample_gaussian_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  if (m < 1 || n < 2) {
    throw DimensionError("sample_gaussian_matrix: need m >= 1 and n >= 2, got m=" +
                         std::to_string(m) + " n=" + std::to_string(n));
  }
  MeasurementEnsemble ens{m, n, seed, Matrix(m, n)};
  NormalRng rng(seed);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) ens.entries(i, j) = rng.normal();
  return ens;
}

double gradient_norm_squared(const GradientOperator& op, int iterations) {
  // Start off the constant kernel with a deterministic alternating pattern.
  Vector x(op.n());
  for (Eigen::Index j = 0; j < op.n(); ++j) x(j) = (j % 2 == 0 ? 1.0 : -1.0) + 0.01 * j;
  x.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Vector y = op.apply_adjoint(op.apply(x));
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    lambda = x.dot(y);
    x = y / norm;
  }
  return lambda;
}

}  // namespace tvcs
