#include "tvcs/rng.hpp"

#include <cmath>
#include <string_view>

namespace tvcs {

double NormalRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalRng::uniform_signed() {
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    if (u != -1.0) return u;
  }
}

double NormalRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, r2;
  do {
    u = uniform_signed();
    v = uniform_signed();
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
  cached_ = v * scale;
  has_cached_ = true;
  return u * scale;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace tvcs
