#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace cfmimo {

// Counter-based substream RNG. Every random quantity in the simulator is
// drawn from a stream whose key is a hash of (root seed, purpose, indices),
// so results do not depend on the order in which setups or trials execute.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Purpose tags for top-level substreams.
enum class Sub : std::uint64_t {
  ApPositions = 1,
  UePositions = 2,
  Kmeans = 3,
  Shadowing = 4,
  Channel = 5,
  PilotNoise = 6,
  Setup = 7,
};

inline std::uint64_t derive_key(std::uint64_t root,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = root;
  for (std::uint64_t v : path) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    std::uint64_t s = h;
    h = splitmix64_next(s);
  }
  std::uint64_t s = h;
  return splitmix64_next(s);
}

inline std::uint64_t derive_key(std::uint64_t root, Sub tag,
                                std::initializer_list<std::uint64_t> path = {}) {
  std::uint64_t h = derive_key(root, {static_cast<std::uint64_t>(tag)});
  return path.size() == 0 ? h : derive_key(h, path);
}

class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard real Gaussian via Box-Muller (cosine branch only).
  double gauss() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1), u1 < 1
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Circularly symmetric complex Gaussian CN(0, 1): |z|^2 ~ Exp(1).
  std::complex<double> cgauss() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log1p(-u1));
    return std::polar(r, 2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace cfmimo
