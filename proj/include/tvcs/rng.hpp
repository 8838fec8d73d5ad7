#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tvcs {

/// Portable seeded source of uniform and standard-normal variates.
///
/// Uniform bits come from std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Doubles in [0,1) take the top 53 bits. Normals use the
/// Marsaglia polar method (only sqrt and log, no trigonometry), caching the
/// second variate of each accepted pair. The same seed gives the same stream
/// on any conforming platform.
class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();            // [0, 1)
  double uniform_signed();     // (-1, 1)
  double normal();
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit seed derivation: folds each word into the state with mix64.
/// The result depends only on the values and their order.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> words);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace tvcs
