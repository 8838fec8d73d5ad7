#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvcs/linops.hpp"

namespace tvcs {

struct SignalError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A length-n signal with its exact jump support.
///
/// Jump positions are 1-based: nu is a jump iff values[nu] != values[nu-1]
/// in 0-based storage, i.e. (Dx)_{nu-1} != 0. delta_max is the largest
/// separation constant Delta with
///     min_i |nu_i - nu_{i-1}| / n >= Delta / (s+1),   nu_0 = 0, nu_{s+1} = n.
struct Signal {
  Vector values;
  std::vector<int> jump_support;
  double delta_max = 1.0;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(values.size()); }
  int s() const { return static_cast<int>(jump_support.size()); }
};

/// Signal from raw values; support detected exactly and delta_max computed.
Signal make_signal(Vector values, std::uint64_t seed = 0);

/// f(t) = levels[k] on (breakpoints[k-1], breakpoints[k]], breakpoints[-1] = 0.
struct PiecewiseConstantSpec {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  void validate() const;
  double operator()(double t) const;
  double min_piece_length() const;
};

/// values[i] = f(i/n), i = 1..n.
Signal discretize_pc(const PiecewiseConstantSpec& spec, int n);

/// Six pieces, five interior breakpoints, smallest piece 0.1.
PiecewiseConstantSpec reference_pc_spec();

/// Levels for the equidistant class: either explicit (s+1 values) or drawn
/// from a seed. Seeded levels start at 0 and take steps of random sign and
/// magnitude uniform in [0.5, 1.5].
struct LevelSource {
  std::optional<std::vector<double>> explicit_levels;
  std::uint64_t seed = 0;

  static LevelSource fixed(std::vector<double> levels) { return {std::move(levels), 0}; }
  static LevelSource seeded(std::uint64_t seed) { return {std::nullopt, seed}; }
};

std::vector<double> realize_levels(const LevelSource& source, int s);

/// Jumps at round(k n / (s+1)), k = 1..s.
Signal make_equidistant(int n, int s, const LevelSource& levels);

/// s consecutive jumps starting at floor(n/2) (shifted left if that runs past
/// n-1), levels alternating 0,1,0,... piece by piece. delta_max = (s+1)/n for
/// s >= 2. With s = 1 this is a centered step, which is equidistant.
Signal make_dense_jump(int n, int s);

struct Separation {
  int s = 0;
  double delta_max = 1.0;
  std::vector<int> gaps;  // s+1 entries, boundary gaps included
};

Separation separation(const Signal& signal);
Separation separation(const std::vector<int>& jump_support, int n);

/// Exact support of Dx (1-based positions).
std::vector<int> exact_jump_support(const Vector& values);

/// Support of Dx with |(Dx)_i| > rel_threshold * ||x||_inf. For solver output.
std::vector<int> detect_jumps(const Vector& values, double rel_threshold = 1e-8);

struct RateEstimate {
  double m = 0.0;
  bool hypothesis_holds = true;  // delta >= 8 s / n
};

/// C (s log^2(n) / delta + u^2), natural logarithm.
RateEstimate theoretical_rate(int n, int s, double delta, double u, double constant);

/// Text format: header `n s seed`, then one value per line (%.17g).
void write_signal(std::ostream& out, const Signal& signal);
Signal read_signal(std::istream& in);
void write_signal_file(const std::string& path, const Signal& signal);
Signal read_signal_file(const std::string& path);

}  // namespace tvcs
