#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tvcs/linops.hpp"
#include "tvcs/signals.hpp"

namespace tvcs {

/// Subdifferential of ||D.||_1 at x0:  { D^T w : w_S = sign((D x0)_S), |w_i| <= 1 off S }.
/// `support` uses the 1-based jump positions of Signal; signs[k] belongs to support[k].
struct SubdifferentialModel {
  int n = 0;
  std::vector<int> support;
  std::vector<double> signs;

  static SubdifferentialModel from_signal(const Signal& signal);
  void validate() const;
};

struct PolarProjection {
  double value = 0.0;  // dist^2(g, cone(subdifferential)) = ||Pi_C g||^2, C the descent cone
  Vector projection;   // Pi_{C°} g
  double scale = 0.0;  // tau at the optimum
  bool converged = false;
};

struct InnerSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// For fixed tau the problem min_w ||g - tau D^T w||^2 becomes a taut string
/// through the tube cumsum(g) +- tau, pinned at the support with offsets
/// tau * sign, solved exactly. The value is convex in tau and minimized with
/// Brent's method; the result is then rescaled along its ray so that
/// <g - p, p> = 0. `inner_tolerance` sets the relative precision of tau and
/// `max_inner_iterations` bounds the number of Brent steps.
PolarProjection polar_cone_distance_sq(const Vector& g, const SubdifferentialModel& model,
                                       double inner_tolerance = 1e-8,
                                       int max_inner_iterations = 5000);

/// One Monte-Carlo draw.
struct WidthSample {
  double value = 0.0;        // ||Pi_C g||^2
  double g_norm_sq = 0.0;    // ||g||^2
  double polar_norm_sq = 0.0;  // ||Pi_{C°} g||^2
  bool converged = false;
};

/// Draws g_k ~ N(0, I_n) with seed derive_seed(seed, {k}) and projects each.
std::vector<WidthSample> sample_cone_widths(const SubdifferentialModel& model, int num_samples,
                                            std::uint64_t seed, double inner_tolerance = 1e-8,
                                            int workers = 1);

struct ConeWidthEstimate {
  // Control-variate mean: mean(value_k - beta (||g_k||^2 - n)), beta fitted on
  // the samples. E||g||^2 = n is known exactly, so this is unbiased to O(1/N)
  // and much tighter than the plain mean when the cone is nearly all of R^n.
  double delta_hat = 0.0;
  double standard_error = 0.0;
  // Plain sample mean of value_k and its standard error.
  double plain_mean = 0.0;
  double plain_standard_error = 0.0;
  int num_samples = 0;  // samples kept
  int discarded = 0;
  double inner_tolerance = 0.0;
  std::uint64_t seed = 0;
};

ConeWidthEstimate summarize_widths(const std::vector<WidthSample>& samples, int n,
                                   double inner_tolerance, std::uint64_t seed);

/// Statistical dimension of the descent cone of ||D.||_1 at the signal.
/// Throws InnerSolveError if more than 1% of samples fail to converge.
ConeWidthEstimate estimate_statistical_dimension(const Signal& signal, int num_samples,
                                                 std::uint64_t seed,
                                                 double inner_tolerance = 1e-8, int workers = 1);
ConeWidthEstimate estimate_statistical_dimension(const SubdifferentialModel& model,
                                                 int num_samples, std::uint64_t seed,
                                                 double inner_tolerance = 1e-8, int workers = 1);

}  // namespace tvcs
