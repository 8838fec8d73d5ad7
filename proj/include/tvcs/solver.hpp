#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "tvcs/linops.hpp"

namespace tvcs {

/// Settings for the primal-dual TV solver.
struct SolverConfig {
  int max_iterations = 20000;
  // On ||A x - y||_2 / max(1, ||y||_2).
  double feasibility_tolerance = 1e-8;
  // On the duality gap and the scaled dual infeasibility.
  double convergence_tolerance = 1e-7;
  // Optimality and restarts are checked every check_interval iterations.
  int check_interval = 10;
  // Initial primal/dual step balance; tau = balance * eta, sigma = eta / balance.
  double step_balance = 1.0;
  // Product tau * sigma * ||D||^2.
  double step_product = 0.95;
  // Update the step balance from iterate movement at each restart.
  bool adaptive_steps = true;

  void validate() const;
};

enum class SolveStatus { converged, iteration_limit, numerical_failure };

std::string_view to_string(SolveStatus status);

struct SolveResult {
  Vector x_hat;
  double objective = 0.0;             // ||D x_hat||_1
  double feasibility_residual = 0.0;  // ||A x_hat - y||_2
  int iterations = 0;
  SolveStatus status = SolveStatus::numerical_failure;
};

/// min ||D x||_1 subject to A x = y.
///
/// Chambolle-Pock iteration on ||D x||_1 + indicator{A x = y}. The affine
/// constraint is handled by exact projection built from one thin QR of A^T
/// (A A^T = R^T R). Square or tall systems are solved directly.
SolveResult solve_tv(const Matrix& a, const Vector& y, const SolverConfig& config = {});

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kOracleMaxDimension = 40;

/// Reference solver for small n: the linear program
///     min sum(a + b)  s.t.  D x - a + b = 0,  A x = y,  a, b >= 0
/// by a dense two-phase tableau simplex with Bland's rule (no cycling on
/// degenerate pivots). The final basis is re-solved with a full-pivot LU.
/// Throws OracleError on n > kOracleMaxDimension or an infeasible system.
SolveResult solve_tv_oracle(const Matrix& a, const Vector& y);

/// ||x_hat - x0||_2 <= tol * max(1, ||x0||_2).
bool check_recovery(const Vector& x_hat, const Vector& x0, double tol);

}  // namespace tvcs
