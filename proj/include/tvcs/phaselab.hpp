#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tvcs/experiment_spec.hpp"

namespace tvcs {

struct GridFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhaseCell {
  int n = 0;
  int m = 0;
  int trials = 0;
  int successes = 0;

  double fraction() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
  friend bool operator==(const PhaseCell&, const PhaseCell&) = default;
};

/// Cells sorted by (n, m). spec_echo is ExperimentSpec::canonical() of the
/// generating spec (empty for hand-written grids).
struct PhaseGrid {
  std::vector<PhaseCell> cells;
  std::string spec_echo;
  int numerical_failures = 0;  // trials whose solve reported numerical-failure
  int iteration_limits = 0;    // trials that stopped at the iteration budget

  std::vector<PhaseCell> column(int n) const;
  std::vector<int> dimensions() const;
  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;
};

/// Seed for trial t of cell (n, m): derive_seed(master_seed, {n, m, t}).
/// Signal levels (when randomized) use derive_seed(trial_seed, {1}); the
/// matrix uses derive_seed(trial_seed, {2}).
std::uint64_t trial_seed(std::uint64_t master_seed, int n, int m, int trial);
std::uint64_t trial_signal_seed(std::uint64_t trial_seed);
std::uint64_t trial_matrix_seed(std::uint64_t trial_seed);

struct TrialOutcome {
  bool success = false;
  SolveStatus status = SolveStatus::converged;
};

/// One trial: build signal, sample A, solve, check recovery. Iteration-limit
/// and numerical failures count as unsuccessful.
TrialOutcome run_trial(const ExperimentSpec& spec, int n, int m, int trial);

PhaseGrid run_phase_grid(const ExperimentSpec& spec, int workers = 1);

enum class TransitionKind { crossed, starts_above, never_reached };

struct TransitionEstimate {
  double m_star = 0.0;
  TransitionKind kind = TransitionKind::crossed;
  bool boundary() const { return kind != TransitionKind::crossed; }
};

/// First crossing of the 50% level, linearly interpolated in m. If the
/// column starts at or above 0.5, m_star is its smallest m; if it never
/// reaches 0.5, m_star is its largest m. Both carry a boundary flag.
TransitionEstimate transition_location(const PhaseGrid& grid, int n);

/// CSV layout:
///   # tvcs phase grid
///   # numerical_failures=<int>
///   # iteration_limits=<int>
///   # spec_checksum=<16 hex digits, FNV-1a 64 of the echo text>   (only with echo)
///   # spec: <echo line>                                            (repeated)
///   n,m,trials,successes
///   <rows sorted by (n, m)>
void write_grid_csv(std::ostream& out, const PhaseGrid& grid);
void write_grid_csv(const PhaseGrid& grid, const std::string& path);
PhaseGrid read_grid_csv(std::istream& in);
PhaseGrid read_grid_csv(const std::string& path);

struct HeatmapOverlays {
  // (n, m) points; drawn as polylines in the plot coordinates.
  std::vector<std::pair<int, double>> width_curve;
  std::vector<std::pair<int, double>> bound_curve;
};

/// SVG 1.1 heat map: one rect per cell with gray level = success fraction
/// (0 black, 1 white), log-scaled n axis, linear m axis.
std::string render_heatmap_svg(const PhaseGrid& grid, const HeatmapOverlays& overlays = {});
void render_heatmap_svg(const PhaseGrid& grid, const HeatmapOverlays& overlays,
                        const std::string& path);

/// "#rrggbb" for a fraction in [0, 1].
std::string gray_hex(double fraction);

}  // namespace tvcs
