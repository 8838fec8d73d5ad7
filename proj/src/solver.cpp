#include "tvcs/solver.hpp"

#include <cmath>
#include <limits>

namespace tvcs {

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(feasibility_tolerance > 0.0) || !(convergence_tolerance > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (check_interval < 1) throw std::invalid_argument("check_interval must be >= 1");
  if (!(step_balance > 0.0)) throw std::invalid_argument("step_balance must be positive");
  if (!(step_product > 0.0 && step_product < 1.0))
    throw std::invalid_argument("step_product must lie in (0, 1)");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_limit: return "iteration-limit";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

bool check_recovery(const Vector& x_hat, const Vector& x0, double tol) {
  if (x_hat.size() != x0.size()) throw DimensionError("check_recovery: length mismatch");
  return (x_hat - x0).norm() <= tol * std::max(1.0, x0.norm());
}

namespace {

double tv_norm(const Vector& x) {
  return (x.tail(x.size() - 1) - x.head(x.size() - 1)).lpNorm<1>();
}

bool all_finite(const Vector& v) { return v.allFinite(); }

SolveResult finish(const Matrix& a, const Vector& y, Vector x, int iterations, SolveStatus status) {
  SolveResult res;
  res.objective = tv_norm(x);
  res.feasibility_residual = (a * x - y).norm();
  res.iterations = iterations;
  res.status = all_finite(x) ? status : SolveStatus::numerical_failure;
  res.x_hat = std::move(x);
  return res;
}

SolveResult solve_square_or_tall(const Matrix& a, const Vector& y, const SolverConfig& config) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < a.cols()) return finish(a, y, Vector::Zero(a.cols()), 0, SolveStatus::numerical_failure);
  Vector x = qr.solve(y);
  const double tol = config.feasibility_tolerance * std::max(1.0, y.norm());
  SolveResult res = finish(a, y, std::move(x), 1, SolveStatus::converged);
  if (res.status == SolveStatus::converged && res.feasibility_residual > tol)
    res.status = SolveStatus::numerical_failure;
  return res;
}

/// Projector onto {x : A x = y} from A^T = Q R.
class AffineProjector {
 public:
  AffineProjector(const Matrix& a, const Vector& y) {
    Eigen::HouseholderQR<Matrix> qr(a.transpose());
    const Eigen::Index m = a.rows();
    q_ = qr.householderQ() * Matrix::Identity(a.cols(), m);
    Matrix r = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
    const double rmax = r.diagonal().cwiseAbs().maxCoeff();
    const double rmin = r.diagonal().cwiseAbs().minCoeff();
    ok_ = rmax > 0.0 && rmin > rmax * 1e3 * std::numeric_limits<double>::epsilon() * a.cols();
    if (ok_) rhs_ = r.transpose().triangularView<Eigen::Lower>().solve(y);
  }

  bool ok() const { return ok_; }

  // x - Q (Q^T x - R^{-T} y)
  void project(Vector& x) const {
    Vector coeff = q_.transpose() * x - rhs_;
    x.noalias() -= q_ * coeff;
  }

  // Component of d in the null space of A.
  void project_direction(Vector& d) const {
    Vector coeff = q_.transpose() * d;
    d.noalias() -= q_ * coeff;
  }

  Vector least_norm_point() const { return q_ * rhs_; }

 private:
  Matrix q_;
  Vector rhs_;
  bool ok_ = false;
};

// Optimality measures for a feasible x and a box-feasible p. The dual
// objective is <D^T p, x_p> with x_p the least-norm point, since the row-space
// part of D^T p equals A^T lambda for some lambda.
struct Kkt {
  double objective = 0.0;
  double dual_infeasibility = 0.0;  // ||(I - QQ^T) D^T p||
  double gap = 0.0;                 // |objective - dual objective|
  double x_norm = 0.0;

  double error() const { return std::hypot(dual_infeasibility, gap); }

  bool converged(double tol) const {
    const double scale = 1.0 + objective;
    return gap <= tol * scale && dual_infeasibility * std::max(1.0, x_norm) <= tol * scale;
  }
};

}  // namespace

SolveResult solve_tv(const Matrix& a, const Vector& y, const SolverConfig& config) {
  config.validate();
  if (a.cols() < 2) throw DimensionError("solve_tv: need n >= 2");
  if (a.rows() < 1) throw DimensionError("solve_tv: need m >= 1");
  if (y.size() != a.rows()) throw DimensionError("solve_tv: y length must equal m");
  if (a.rows() >= a.cols()) return solve_square_or_tall(a, y, config);

  const Eigen::Index n = a.cols();
  const GradientOperator grad(n);
  AffineProjector proj(a, y);
  if (!proj.ok()) return finish(a, y, Vector::Zero(n), 0, SolveStatus::numerical_failure);
  const Vector x_ln = proj.least_norm_point();

  auto kkt = [&](const Vector& x, const Vector& p) {
    Kkt k;
    const Vector dx = grad.apply(x);
    const Vector dtp = grad.apply_adjoint(p);
    Vector null_part = dtp;
    proj.project_direction(null_part);
    k.objective = dx.lpNorm<1>();
    k.dual_infeasibility = null_part.norm();
    k.gap = std::abs(k.objective - dtp.dot(x_ln));
    k.x_norm = x.norm();
    return k;
  };

  // Step sizes: tau = eta / omega, sigma = eta * omega, tau sigma ||D||^2 = step_product.
  const double lipschitz = std::sqrt(std::max(gradient_norm_squared(grad, 200) * 1.01, 1e-12));
  const double eta = std::sqrt(config.step_product) / lipschitz;
  double omega = 1.0 / config.step_balance;

  // Restart thresholds on the KKT error relative to the last restart point.
  constexpr double kSufficientDecay = 0.2;
  constexpr double kNecessaryDecay = 0.8;
  constexpr double kArtificialFraction = 0.36;
  constexpr double kWeightSmoothing = 0.5;

  Vector x = x_ln;
  Vector x_bar = x;
  Vector p = Vector::Zero(n - 1);
  Vector x_new(n), p_new(n - 1);
  Vector x_sum = Vector::Zero(n), p_sum = Vector::Zero(n - 1);
  int averaged = 0;
  int last_restart_it = 0;
  Vector x_restart = x, p_restart = p;
  double kkt_restart = kkt(x, p).error();
  double kkt_last_candidate = std::numeric_limits<double>::infinity();

  const double feas_tol = config.feasibility_tolerance * std::max(1.0, y.norm());
  const double tol = config.convergence_tolerance;

  Vector best_x = x;
  double best_objective = tv_norm(x);

  auto accept = [&](Vector xc, int it) {
    SolveResult res = finish(a, y, std::move(xc), it, SolveStatus::converged);
    if (res.status == SolveStatus::converged && res.feasibility_residual > feas_tol)
      res.status = SolveStatus::numerical_failure;
    return res;
  };

  for (int it = 1; it <= config.max_iterations; ++it) {
    const double tau = eta / omega;
    const double sigma = eta * omega;
    p_new = (p + sigma * grad.apply(x_bar)).cwiseMax(-1.0).cwiseMin(1.0);
    x_new = x - tau * grad.apply_adjoint(p_new);
    proj.project(x_new);
    x_sum += x_new;
    p_sum += p_new;
    ++averaged;

    const bool check = (it % config.check_interval == 0) || it == config.max_iterations;
    if (!check) {
      x_bar = 2.0 * x_new - x;
      x.swap(x_new);
      p.swap(p_new);
      continue;
    }

    if (!all_finite(x_new) || !all_finite(p_new))
      return finish(a, y, best_x, it, SolveStatus::numerical_failure);
    const Vector x_avg = x_sum / averaged;
    const Vector p_avg = p_sum / averaged;
    const Kkt k_cur = kkt(x_new, p_new);
    const Kkt k_avg = kkt(x_avg, p_avg);
    if (k_cur.objective < best_objective) {
      best_objective = k_cur.objective;
      best_x = x_new;
    }
    if (k_avg.objective < best_objective) {
      best_objective = k_avg.objective;
      best_x = x_avg;
    }
    if (k_cur.converged(tol)) return accept(x_new, it);
    if (k_avg.converged(tol)) return accept(x_avg, it);

    const bool use_avg = k_avg.error() < k_cur.error();
    const double kkt_candidate = use_avg ? k_avg.error() : k_cur.error();
    const bool restart =
        kkt_candidate <= kSufficientDecay * kkt_restart ||
        (kkt_candidate <= kNecessaryDecay * kkt_restart && kkt_candidate > kkt_last_candidate) ||
        (it - last_restart_it) >= kArtificialFraction * it;
    kkt_last_candidate = kkt_candidate;

    if (restart) {
      Vector xc = use_avg ? x_avg : x_new;
      Vector pc = use_avg ? p_avg : p_new;
      if (config.adaptive_steps) {
        const double dx = (xc - x_restart).norm();
        const double dp = (pc - p_restart).norm();
        if (dx > 1e-10 && dp > 1e-10)
          omega = std::exp(kWeightSmoothing * std::log(dp / dx) + (1.0 - kWeightSmoothing) * std::log(omega));
      }
      x = xc;
      p = pc;
      x_bar = x;
      x_restart = x;
      p_restart = p;
      kkt_restart = kkt_candidate;
      kkt_last_candidate = std::numeric_limits<double>::infinity();
      x_sum.setZero();
      p_sum.setZero();
      averaged = 0;
      last_restart_it = it;
    } else {
      x_bar = 2.0 * x_new - x;
      x.swap(x_new);
      p.swap(p_new);
    }
  }

  if (tv_norm(x) <= best_objective) best_x = x;
  return finish(a, y, best_x, config.max_iterations, SolveStatus::iteration_limit);
}

}  // namespace tvcs
