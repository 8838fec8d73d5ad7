#include "tvcs/conegeom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "tvcs/parallel.hpp"
#include "tvcs/rng.hpp"
#include "tvcs/taut_string.hpp"

namespace tvcs {

SubdifferentialModel SubdifferentialModel::from_signal(const Signal& signal) {
  SubdifferentialModel model;
  model.n = signal.n();
  model.support = signal.jump_support;
  for (int nu : signal.jump_support)
    model.signs.push_back(signal.values(nu) > signal.values(nu - 1) ? 1.0 : -1.0);
  return model;
}

void SubdifferentialModel::validate() const {
  if (n < 2) throw std::invalid_argument("subdifferential model needs n >= 2");
  if (support.size() != signs.size())
    throw std::invalid_argument("subdifferential model needs one sign per support index");
  int previous = 0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] <= previous || support[k] >= n)
      throw std::invalid_argument("support must be strictly increasing within 1..n-1");
    if (signs[k] != 1.0 && signs[k] != -1.0) throw std::invalid_argument("signs must be +-1");
    previous = support[k];
  }
}

namespace {

/// Partial minimization over w for a fixed tau.
class FixedScaleProblem {
 public:
  FixedScaleProblem(const Vector& g, const SubdifferentialModel& model)
      : n_(model.n), cumsum_(static_cast<std::size_t>(model.n) + 1, 0.0),
        pin_(static_cast<std::size_t>(model.n) + 1, 0.0),
        pinned_(static_cast<std::size_t>(model.n) + 1, false),
        lower_(cumsum_.size()), upper_(cumsum_.size()) {
    for (int j = 1; j <= n_; ++j) cumsum_[j] = cumsum_[j - 1] + g(j - 1);
    for (std::size_t k = 0; k < model.support.size(); ++k) {
      pinned_[static_cast<std::size_t>(model.support[k])] = true;
      pin_[static_cast<std::size_t>(model.support[k])] = model.signs[k];
    }
  }

  // F_0..F_n of the taut string at scale tau.
  std::vector<double> string_at(double tau) {
    for (int j = 0; j <= n_; ++j) {
      const double c = cumsum_[j];
      if (j == 0 || j == n_) {
        lower_[j] = upper_[j] = c;
      } else if (pinned_[j]) {
        lower_[j] = upper_[j] = c + tau * pin_[j];
      } else {
        lower_[j] = c - tau;
        upper_[j] = c + tau;
      }
    }
    return taut_string(lower_, upper_);
  }

  double value_at(double tau) {
    const auto f = string_at(tau);
    double v = 0.0;
    for (int j = 1; j <= n_; ++j) v += (f[j] - f[j - 1]) * (f[j] - f[j - 1]);
    return v;
  }

  // p = D^T u with u_j = F_j - cumsum_j, u_0 = u_n = 0.
  Vector polar_point(const std::vector<double>& f) const {
    Vector p(n_);
    for (int j = 1; j <= n_; ++j) {
      const double u_prev = j - 1 == 0 ? 0.0 : f[j - 1] - cumsum_[j - 1];
      const double u_cur = j == n_ ? 0.0 : f[j] - cumsum_[j];
      p(j - 1) = u_prev - u_cur;
    }
    return p;
  }

  // Smallest tau at which the free tube no longer binds C_j - j C_n / n.
  double free_scale() const {
    double t = 0.0;
    for (int j = 1; j < n_; ++j)
      t = std::max(t, std::abs(cumsum_[j] - cumsum_[n_] * j / n_));
    return t;
  }

 private:
  int n_;
  std::vector<double> cumsum_;
  std::vector<double> pin_;
  std::vector<bool> pinned_;
  std::vector<double> lower_, upper_;
};

}  // namespace

PolarProjection polar_cone_distance_sq(const Vector& g, const SubdifferentialModel& model,
                                       double inner_tolerance, int max_inner_iterations) {
  model.validate();
  if (g.size() != model.n) throw DimensionError("polar_cone_distance_sq: g must have length n");
  if (!(inner_tolerance > 0.0)) throw std::invalid_argument("inner_tolerance must be positive");

  FixedScaleProblem problem(g, model);
  const double g_norm = g.norm();
  // ||tau D^T w|| >= 2 tau / sqrt(n) once some w_i = +-1 is pinned, and the
  // projection has norm at most ||g||.
  double tau_max = problem.free_scale();
  if (!model.support.empty()) tau_max = std::max(tau_max, 0.5 * g_norm * std::sqrt(double(model.n)));
  tau_max = 1.5 * tau_max + 1e-300;

  PolarProjection out;
  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(inner_tolerance))), 8,
                              std::numeric_limits<double>::digits / 2);
  std::uintmax_t iterations = static_cast<std::uintmax_t>(std::max(1, max_inner_iterations));
  const auto best = boost::math::tools::brent_find_minima(
      [&](double tau) { return problem.value_at(tau); }, 0.0, tau_max, bits, iterations);
  out.converged = iterations < static_cast<std::uintmax_t>(std::max(1, max_inner_iterations));

  double tau = best.first;
  Vector p = problem.polar_point(problem.string_at(tau));
  const double pp = p.squaredNorm();
  const double gp = g.dot(p);
  double ray_scale = 0.0;
  if (pp > 0.0 && gp > 0.0) ray_scale = gp / pp;
  p *= ray_scale;
  out.projection = std::move(p);
  out.scale = tau * ray_scale;
  out.value = (g - out.projection).squaredNorm();
  if (!std::isfinite(out.value)) out.converged = false;
  return out;
}

std::vector<WidthSample> sample_cone_widths(const SubdifferentialModel& model, int num_samples,
                                            std::uint64_t seed, double inner_tolerance,
                                            int workers) {
  model.validate();
  if (num_samples < 1) throw std::invalid_argument("num_samples must be >= 1");
  std::vector<WidthSample> samples(static_cast<std::size_t>(num_samples));
  parallel_for(samples.size(), workers, [&](std::size_t k) {
    NormalRng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    Vector g(model.n);
    for (int j = 0; j < model.n; ++j) g(j) = rng.normal();
    const PolarProjection proj = polar_cone_distance_sq(g, model, inner_tolerance);
    WidthSample& s = samples[k];
    s.value = proj.value;
    s.g_norm_sq = g.squaredNorm();
    s.polar_norm_sq = proj.projection.squaredNorm();
    s.converged = proj.converged;
  });
  return samples;
}

ConeWidthEstimate summarize_widths(const std::vector<WidthSample>& samples, int n,
                                   double inner_tolerance, std::uint64_t seed) {
  ConeWidthEstimate est;
  est.inner_tolerance = inner_tolerance;
  est.seed = seed;
  std::vector<const WidthSample*> kept;
  for (const auto& s : samples) {
    if (s.converged) kept.push_back(&s);
    else ++est.discarded;
  }
  est.num_samples = static_cast<int>(kept.size());
  if (est.discarded * 100 > static_cast<int>(samples.size()))
    throw InnerSolveError("cone width: " + std::to_string(est.discarded) + " of " +
                          std::to_string(samples.size()) + " inner solves failed (cap 1%)");
  if (kept.size() < 2) throw InnerSolveError("cone width: fewer than two usable samples");

  const double count = static_cast<double>(kept.size());
  double mean_v = 0.0, mean_g = 0.0;
  for (const auto* s : kept) {
    mean_v += s->value;
    mean_g += s->g_norm_sq;
  }
  mean_v /= count;
  mean_g /= count;
  double var_v = 0.0, var_g = 0.0, cov = 0.0;
  for (const auto* s : kept) {
    const double dv = s->value - mean_v;
    const double dg = s->g_norm_sq - mean_g;
    var_v += dv * dv;
    var_g += dg * dg;
    cov += dv * dg;
  }
  var_v /= count - 1.0;
  var_g /= count - 1.0;
  cov /= count - 1.0;
  est.plain_mean = mean_v;
  est.plain_standard_error = std::sqrt(var_v / count);

  const double beta = var_g > 0.0 ? cov / var_g : 0.0;
  double mean_a = 0.0;
  std::vector<double> adjusted;
  adjusted.reserve(kept.size());
  for (const auto* s : kept) {
    adjusted.push_back(s->value - beta * (s->g_norm_sq - n));
    mean_a += adjusted.back();
  }
  mean_a /= count;
  double var_a = 0.0;
  for (double a : adjusted) var_a += (a - mean_a) * (a - mean_a);
  var_a /= count - 1.0;
  est.delta_hat = std::clamp(mean_a, 0.0, static_cast<double>(n));
  est.standard_error = std::sqrt(var_a / count);
  return est;
}

ConeWidthEstimate estimate_statistical_dimension(const SubdifferentialModel& model,
                                                 int num_samples, std::uint64_t seed,
                                                 double inner_tolerance, int workers) {
  if (num_samples < 2) throw std::invalid_argument("num_samples must be >= 2");
  const auto samples = sample_cone_widths(model, num_samples, seed, inner_tolerance, workers);
  return summarize_widths(samples, model.n, inner_tolerance, seed);
}

ConeWidthEstimate estimate_statistical_dimension(const Signal& signal, int num_samples,
                                                 std::uint64_t seed, double inner_tolerance,
                                                 int workers) {
  return estimate_statistical_dimension(SubdifferentialModel::from_signal(signal), num_samples,
                                        seed, inner_tolerance, workers);
}

}  // namespace tvcs
