#include "tvcs/taut_string.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace tvcs {

namespace {

struct Point {
  double x;
  double y;
};

double slope(const Point& a, const Point& b) { return (b.y - a.y) / (b.x - a.x); }

/// Funnel state. Both chains start at the current apex. The upper chain
/// (string passing under upper gate ends) is convex, the lower chain concave.
class Funnel {
 public:
  explicit Funnel(Point start) : upper_{start}, lower_{start} { path_.push_back(start); }

  void add_upper(const Point& p) {
    if (lower_.size() >= 2 && slope(lower_[0], p) < slope(lower_[0], lower_[1])) {
      while (lower_.size() >= 2 && slope(lower_[0], p) < slope(lower_[0], lower_[1])) {
        lower_.pop_front();
        path_.push_back(lower_.front());
      }
      upper_.assign({lower_.front(), p});
      return;
    }
    while (upper_.size() >= 2 &&
           slope(upper_[upper_.size() - 2], upper_.back()) >= slope(upper_[upper_.size() - 2], p))
      upper_.pop_back();
    upper_.push_back(p);
  }

  void add_lower(const Point& q) {
    if (upper_.size() >= 2 && slope(upper_[0], q) > slope(upper_[0], upper_[1])) {
      while (upper_.size() >= 2 && slope(upper_[0], q) > slope(upper_[0], upper_[1])) {
        upper_.pop_front();
        path_.push_back(upper_.front());
      }
      lower_.assign({upper_.front(), q});
      return;
    }
    while (lower_.size() >= 2 &&
           slope(lower_[lower_.size() - 2], lower_.back()) <= slope(lower_[lower_.size() - 2], q))
      lower_.pop_back();
    lower_.push_back(q);
  }

  // Both chains end at the pinned final point; at most one of them still has
  // interior vertices and the string follows that one.
  std::vector<Point> finish() {
    const auto& chain = lower_.size() > upper_.size() ? lower_ : upper_;
    for (std::size_t i = 1; i < chain.size(); ++i) path_.push_back(chain[i]);
    return std::move(path_);
  }

 private:
  std::deque<Point> upper_;
  std::deque<Point> lower_;
  std::vector<Point> path_;
};

}  // namespace

std::vector<double> taut_string(std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != upper.size() || lower.size() < 2)
    throw std::invalid_argument("taut_string: gate arrays must match and have length >= 2");
  const std::size_t last = lower.size() - 1;
  if (lower[0] != upper[0] || lower[last] != upper[last])
    throw std::invalid_argument("taut_string: endpoints must be pinned");

  std::vector<double> f(lower.size());
  // Split at pinned gates; each piece is an independent funnel problem.
  std::size_t begin = 0;
  while (begin < last) {
    std::size_t end = begin + 1;
    while (end < last && lower[end] != upper[end]) ++end;
    Funnel funnel({static_cast<double>(begin), lower[begin]});
    for (std::size_t j = begin + 1; j <= end; ++j) {
      if (lower[j] > upper[j]) throw std::invalid_argument("taut_string: lower gate above upper");
      funnel.add_upper({static_cast<double>(j), upper[j]});
      funnel.add_lower({static_cast<double>(j), lower[j]});
    }
    const auto path = funnel.finish();
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const auto x0 = static_cast<std::size_t>(path[k].x);
      const auto x1 = static_cast<std::size_t>(path[k + 1].x);
      const double step = (path[k + 1].y - path[k].y) / static_cast<double>(x1 - x0);
      for (std::size_t j = x0; j < x1; ++j) f[j] = path[k].y + step * static_cast<double>(j - x0);
    }
    f[end] = lower[end];
    begin = end;
  }
  // Gates are satisfied exactly up to rounding in the interpolation.
  for (std::size_t j = 0; j <= last; ++j) f[j] = std::min(std::max(f[j], lower[j]), upper[j]);
  return f;
}

}  // namespace tvcs
