#include "tvcs/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tvcs/rng.hpp"

namespace tvcs {

std::vector<int> exact_jump_support(const Vector& values) {
  std::vector<int> support;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values(i) != values(i - 1)) support.push_back(static_cast<int>(i));
  return support;
}

std::vector<int> detect_jumps(const Vector& values, double rel_threshold) {
  std::vector<int> support;
  const double scale = values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
  const double threshold = rel_threshold * scale;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (std::abs(values(i) - values(i - 1)) > threshold) support.push_back(static_cast<int>(i));
  return support;
}

Separation separation(const std::vector<int>& jump_support, int n) {
  Separation sep;
  sep.s = static_cast<int>(jump_support.size());
  int previous = 0;
  int min_gap = n;
  for (int nu : jump_support) {
    sep.gaps.push_back(nu - previous);
    previous = nu;
  }
  sep.gaps.push_back(n - previous);
  for (int g : sep.gaps) min_gap = std::min(min_gap, g);
  sep.delta_max = static_cast<double>(sep.s + 1) * min_gap / n;
  return sep;
}

Separation separation(const Signal& signal) { return separation(signal.jump_support, signal.n()); }

Signal make_signal(Vector values, std::uint64_t seed) {
  if (values.size() < 2) throw SignalError("signal needs n >= 2");
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (!std::isfinite(values(i))) throw SignalError("signal contains a non-finite value");
  Signal sig;
  sig.jump_support = exact_jump_support(values);
  sig.delta_max = separation(sig.jump_support, static_cast<int>(values.size())).delta_max;
  sig.values = std::move(values);
  sig.seed = seed;
  return sig;
}

void PiecewiseConstantSpec::validate() const {
  if (breakpoints.empty()) throw SignalError("piecewise spec needs at least one piece");
  if (levels.size() != breakpoints.size())
    throw SignalError("piecewise spec needs one level per piece");
  double prev = 0.0;
  for (double b : breakpoints) {
    if (!(b > prev)) throw SignalError("breakpoints must be strictly increasing in (0,1]");
    prev = b;
  }
  if (breakpoints.back() != 1.0) throw SignalError("last breakpoint must be 1");
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (levels[k] == levels[k - 1]) throw SignalError("adjacent levels must differ");
}

double PiecewiseConstantSpec::operator()(double t) const {
  // Half-open pieces (a_{k-1}, a_k].
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
  if (it == breakpoints.end()) --it;
  return levels[static_cast<std::size_t>(it - breakpoints.begin())];
}

double PiecewiseConstantSpec::min_piece_length() const {
  double prev = 0.0;
  double shortest = 1.0;
  for (double b : breakpoints) {
    shortest = std::min(shortest, b - prev);
    prev = b;
  }
  return shortest;
}

Signal discretize_pc(const PiecewiseConstantSpec& spec, int n) {
  spec.validate();
  if (n < 2) throw SignalError("discretize_pc needs n >= 2");
  Vector values(n);
  for (int i = 1; i <= n; ++i) values(i - 1) = spec(static_cast<double>(i) / n);
  return make_signal(std::move(values));
}

PiecewiseConstantSpec reference_pc_spec() {
  return {{0.15, 0.35, 0.45, 0.7, 0.85, 1.0}, {0.2, 1.0, 0.4, -0.5, 0.6, 0.0}};
}

std::vector<double> realize_levels(const LevelSource& source, int s) {
  if (source.explicit_levels) {
    const auto& lv = *source.explicit_levels;
    if (static_cast<int>(lv.size()) != s + 1)
      throw SignalError("expected " + std::to_string(s + 1) + " levels, got " +
                        std::to_string(lv.size()));
    for (std::size_t k = 1; k < lv.size(); ++k)
      if (lv[k] == lv[k - 1]) throw SignalError("adjacent levels must differ");
    return lv;
  }
  NormalRng rng(source.seed);
  std::vector<double> lv(static_cast<std::size_t>(s) + 1, 0.0);
  for (int k = 1; k <= s; ++k) {
    const double magnitude = 0.5 + rng.uniform();
    const double sign = (rng.bits() >> 63) ? 1.0 : -1.0;
    lv[k] = lv[k - 1] + sign * magnitude;
  }
  return lv;
}

namespace {

Signal piecewise_from_jumps(int n, const std::vector<int>& jumps, const std::vector<double>& levels,
                            std::uint64_t seed) {
  Vector values(n);
  std::size_t piece = 0;
  for (int i = 0; i < n; ++i) {
    if (piece < jumps.size() && i == jumps[piece]) ++piece;
    values(i) = levels[piece];
  }
  return make_signal(std::move(values), seed);
}

}  // namespace

Signal make_equidistant(int n, int s, const LevelSource& levels) {
  if (n < 2) throw SignalError("make_equidistant needs n >= 2");
  if (s < 0 || s >= n) throw SignalError("make_equidistant needs 0 <= s < n");
  const auto lv = realize_levels(levels, s);
  std::vector<int> jumps;
  const long long denom = 2LL * (s + 1);
  for (int k = 1; k <= s; ++k) jumps.push_back(static_cast<int>((2LL * k * n + (s + 1)) / denom));
  return piecewise_from_jumps(n, jumps, lv, levels.explicit_levels ? 0 : levels.seed);
}

Signal make_dense_jump(int n, int s) {
  if (n < 2) throw SignalError("make_dense_jump needs n >= 2");
  if (s < 1 || s > n - 1) throw SignalError("make_dense_jump needs 1 <= s <= n-1");
  const int start = std::min(n / 2, n - s);
  std::vector<int> jumps;
  std::vector<double> lv;
  for (int k = 0; k < s; ++k) jumps.push_back(start + k);
  for (int k = 0; k <= s; ++k) lv.push_back(k % 2 == 0 ? 0.0 : 1.0);
  return piecewise_from_jumps(n, jumps, lv, 0);
}

RateEstimate theoretical_rate(int n, int s, double delta, double u, double constant) {
  if (n < 2 || s < 1 || !(delta > 0.0) || constant < 0.0)
    throw SignalError("theoretical_rate needs n >= 2, s >= 1, delta > 0, C >= 0");
  const double log_n = std::log(static_cast<double>(n));
  RateEstimate est;
  est.m = constant * (s * log_n * log_n / delta + u * u);
  est.hypothesis_holds = delta >= 8.0 * s / n;
  return est;
}

void write_signal(std::ostream& out, const Signal& signal) {
  out << signal.n() << ' ' << signal.s() << ' ' << signal.seed << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < signal.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", signal.values(i));
    out << buf;
  }
}

Signal read_signal(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw SignalError("signal file: missing header");
  std::istringstream hs(header);
  long long n = 0, s = 0;
  std::uint64_t seed = 0;
  std::string extra;
  if (!(hs >> n >> s >> seed) || (hs >> extra))
    throw SignalError("signal file: header must be `n s seed`");
  if (n < 2) throw SignalError("signal file: n must be >= 2");
  Vector values(n);
  std::string line;
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw SignalError("signal file: expected " + std::to_string(n) + " values");
    std::istringstream ls(line);
    double v;
    if (!(ls >> v) || (ls >> extra)) throw SignalError("signal file: bad value on line " + std::to_string(i + 2));
    values(i) = v;
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw SignalError("signal file: trailing content after values");
  Signal sig = make_signal(std::move(values), seed);
  if (sig.s() != s)
    throw SignalError("signal file: header says s=" + std::to_string(s) + " but values have " +
                      std::to_string(sig.s()) + " jumps");
  return sig;
}

void write_signal_file(const std::string& path, const Signal& signal) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_signal(out, signal);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Signal read_signal_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_signal(in);
}

}  // namespace tvcs
