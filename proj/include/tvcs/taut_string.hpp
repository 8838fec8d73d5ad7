#pragma once

#include <span>
#include <vector>

namespace tvcs {

/// Taut string through a corridor of vertical gates.
///
/// Given lower[j] <= upper[j] for j = 0..N with both ends pinned
/// (lower[0] == upper[0], lower[N] == upper[N]), returns F_0..F_N with
/// lower <= F <= upper minimizing sum_j (F_j - F_{j-1})^2. The minimizer is
/// the shortest polygonal path through the gates and is the same for every
/// strictly convex function of the increments. Interior gates may have zero
/// width. Runs in amortized O(N).
std::vector<double> taut_string(std::span<const double> lower, std::span<const double> upper);

}  // namespace tvcs
