#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace tvcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Forward-difference gradient with von Neumann boundary, D : R^n -> R^{n-1},
/// (Dx)_i = x_{i+1} - x_i. Applied as a stencil; never stored.
class GradientOperator {
 public:
  explicit GradientOperator(Eigen::Index n);

  Eigen::Index n() const { return n_; }
  Eigen::Index rows() const { return n_ - 1; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& z) const;

  // Dense (n-1) x n copy of D. Tests only.
  Matrix materialize() const;

 private:
  Eigen::Index n_;
};

/// Seeded m x n matrix of i.i.d. N(0,1) entries, filled row-major from a
/// single NormalRng stream.
struct MeasurementEnsemble {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
  Matrix entries;
};

MeasurementEnsemble sample_gaussian_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed);

// Largest eigenvalue of D^T D by power iteration from a fixed start vector.
double gradient_norm_squared(const GradientOperator& op, int iterations = 500);

}  // namespace tvcs
