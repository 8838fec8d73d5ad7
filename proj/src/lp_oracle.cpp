#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "tvcs/solver.hpp"

namespace tvcs {

namespace {

/// Dense tableau for  min c^T v  s.t.  E v = f, v >= 0.
///
/// Row r of `tab` holds the constraint in basis-column form; the last row is
/// the reduced-cost row and the last column the right-hand side. Pivoting
/// follows Bland's rule: the entering column is the lowest index with a
/// negative reduced cost, ties in the ratio test go to the lowest basic index.
class Tableau {
 public:
  Tableau(const Matrix& e, const Vector& f) : rows_(e.rows()), cols_(e.cols()) {
    // Columns: structural [0, cols_), artificial [cols_, cols_ + rows_).
    tab_ = Matrix::Zero(rows_ + 1, cols_ + rows_ + 1);
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double sign = f(r) < 0.0 ? -1.0 : 1.0;
      tab_.row(r).head(cols_) = sign * e.row(r);
      tab_(r, cols_ + r) = 1.0;
      tab_(r, width() - 1) = sign * f(r);
      basis_[static_cast<std::size_t>(r)] = cols_ + r;
    }
    tol_ = 1e-10 * std::max(1.0, e.cwiseAbs().maxCoeff());
  }

  // Phase one: minimize the sum of artificials. Returns the optimum.
  double phase_one() {
    set_costs(Vector::Zero(cols_), true);
    run(cols_ + rows_);
    return -tab_(rows_, width() - 1);
  }

  // Pivot zero-level artificials out of the basis; drop redundant rows.
  void expel_artificials() {
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < cols_) continue;
      Eigen::Index entering = -1;
      for (Eigen::Index c = 0; c < cols_; ++c)
        if (std::abs(tab_(r, c)) > tol_) {
          entering = c;
          break;
        }
      if (entering >= 0) pivot(r, entering);
      else redundant_.push_back(r);
    }
  }

  void phase_two(const Vector& costs) {
    set_costs(costs, false);
    run(cols_);
  }

  std::vector<Eigen::Index> structural_basis() const {
    std::vector<Eigen::Index> b;
    for (Eigen::Index r = 0; r < rows_; ++r)
      if (basis_[static_cast<std::size_t>(r)] < cols_) b.push_back(basis_[static_cast<std::size_t>(r)]);
    return b;
  }

  std::vector<Eigen::Index> kept_rows() const {
    std::vector<Eigen::Index> kept;
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (k < redundant_.size() && redundant_[k] == r) {
        ++k;
        continue;
      }
      kept.push_back(r);
    }
    return kept;
  }

  Vector solution() const {
    Vector v = Vector::Zero(cols_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(r)];
      if (b < cols_) v(b) = tab_(r, width() - 1);
    }
    return v;
  }

  long pivots() const { return pivots_; }

 private:
  Eigen::Index width() const { return cols_ + rows_ + 1; }

  void set_costs(const Vector& structural, bool artificial) {
    tab_.row(rows_).setZero();
    tab_.row(rows_).head(cols_) = structural.transpose();
    if (artificial) tab_.row(rows_).segment(cols_, rows_).setOnes();
    // Price out the basic columns.
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(r)];
      const double cb = tab_(rows_, b);
      if (cb != 0.0) tab_.row(rows_) -= cb * tab_.row(r);
    }
  }

  void run(Eigen::Index allowed_cols) {
    for (;;) {
      Eigen::Index entering = -1;
      for (Eigen::Index c = 0; c < allowed_cols; ++c)
        if (tab_(rows_, c) < -tol_) {
          entering = c;
          break;
        }
      if (entering < 0) return;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double coef = tab_(r, entering);
        if (coef > tol_) best_ratio = std::min(best_ratio, tab_(r, width() - 1) / coef);
      }
      Eigen::Index leaving = -1;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double coef = tab_(r, entering);
        if (coef <= tol_ || tab_(r, width() - 1) / coef > best_ratio + tol_) continue;
        if (leaving < 0 ||
            basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leaving)])
          leaving = r;
      }
      if (leaving < 0) throw OracleError("oracle LP is unbounded");
      pivot(leaving, entering);
      if (++pivots_ > 200000) throw OracleError("oracle simplex exceeded pivot budget");
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    tab_.row(r) /= tab_(r, c);
    for (Eigen::Index k = 0; k <= rows_; ++k) {
      if (k == r) continue;
      const double factor = tab_(k, c);
      if (factor != 0.0) tab_.row(k) -= factor * tab_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  Eigen::Index rows_, cols_;
  Matrix tab_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> redundant_;
  double tol_ = 1e-10;
  long pivots_ = 0;
};

}  // namespace

SolveResult solve_tv_oracle(const Matrix& a, const Vector& y) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (n < 2) throw DimensionError("oracle: need n >= 2");
  if (n > kOracleMaxDimension)
    throw OracleError("oracle: n=" + std::to_string(n) + " exceeds cap " +
                      std::to_string(kOracleMaxDimension));
  if (y.size() != m) throw DimensionError("oracle: y length must equal m");

  // v = [x+ (n), x- (n), a (n-1), b (n-1)]
  const Eigen::Index k = n - 1;
  const Eigen::Index cols = 2 * n + 2 * k;
  Matrix e = Matrix::Zero(k + m, cols);
  Vector f = Vector::Zero(k + m);
  const Matrix d = GradientOperator(n).materialize();
  e.block(0, 0, k, n) = d;
  e.block(0, n, k, n) = -d;
  e.block(0, 2 * n, k, k) = -Matrix::Identity(k, k);
  e.block(0, 2 * n + k, k, k) = Matrix::Identity(k, k);
  e.block(k, 0, m, n) = a;
  e.block(k, n, m, n) = -a;
  f.tail(m) = y;
  Vector costs = Vector::Zero(cols);
  costs.tail(2 * k).setOnes();

  Tableau tab(e, f);
  const double infeasibility = tab.phase_one();
  if (infeasibility > 1e-7 * std::max(1.0, y.lpNorm<1>()))
    throw OracleError("oracle: constraints A x = y are infeasible");
  tab.expel_artificials();
  tab.phase_two(costs);

  // Re-solve the optimal basis system exactly on the kept rows.
  const auto basis = tab.structural_basis();
  const auto rows = tab.kept_rows();
  Vector v = tab.solution();
  if (basis.size() == rows.size() && !basis.empty()) {
    Matrix eb(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(basis.size()));
    Vector fb(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      fb(static_cast<Eigen::Index>(i)) = f(rows[i]);
      for (std::size_t j = 0; j < basis.size(); ++j)
        eb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e(rows[i], basis[j]);
    }
    Eigen::FullPivLU<Matrix> lu(eb);
    if (lu.isInvertible()) {
      const Vector vb = lu.solve(fb);
      v.setZero();
      for (std::size_t j = 0; j < basis.size(); ++j) v(basis[j]) = vb(static_cast<Eigen::Index>(j));
    }
  }

  SolveResult res;
  res.x_hat = v.head(n) - v.segment(n, n);
  res.objective = GradientOperator(n).apply(res.x_hat).lpNorm<1>();
  res.feasibility_residual = (a * res.x_hat - y).norm();
  res.iterations = static_cast<int>(tab.pivots());
  res.status = res.x_hat.allFinite() ? SolveStatus::converged : SolveStatus::numerical_failure;
  return res;
}

}  // namespace tvcs
