#pragma once

#include <cmath>
#include <cstdint>

// Counter-based randomness. Every draw is a pure function of a 64-bit key
// and a counter, so any vertex/particle/trial gets its own reproducible
// substream no matter which thread touches it first.

namespace treelab {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Key for the root vertex of one trial.
constexpr std::uint64_t trial_key(std::uint64_t base_seed, std::uint64_t trial_index) {
  return mix64(base_seed ^ mix64(trial_index));
}

// Key of the i-th child (i >= 1) given its parent's key. Folding this over a
// vertex path gives a stable per-vertex key independent of traversal order.
constexpr std::uint64_t child_key(std::uint64_t parent_key, std::uint64_t i) {
  return mix64(parent_key ^ (i * 0xda942042e4dd58b5ULL));
}

// Named substreams hanging off a vertex/particle key.
inline constexpr std::uint64_t kStreamChildCount = 0xc2b2ae3d27d4eb4fULL;
inline constexpr std::uint64_t kStreamInfection = 0x165667b19e3779f9ULL;
inline constexpr std::uint64_t kStreamRecovery = 0x27d4eb2f165667c5ULL;
inline constexpr std::uint64_t kStreamBirthCount = 0x9e3779b185ebca87ULL;
inline constexpr std::uint64_t kStreamBirthPlace = 0x85ebca77c2b2ae63ULL;

// Stateless stream of draws: value j of stream `tag` under `key`.
class CounterRng {
 public:
  CounterRng(std::uint64_t key, std::uint64_t tag) : key_(mix64(key ^ tag)) {}

  std::uint64_t next_u64() { return mix64(key_ ^ mix64(++ctr_)); }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  double next_exp(double rate) { return -std::log(next_unit()) / rate; }

  // Inversion by sequential search; exact for the moderate means we use.
  std::uint64_t next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    double u = next_unit();
    double p = std::exp(-mean);
    double cum = p;
    std::uint64_t k = 0;
    while (u > cum) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
      if (p < 1e-300) break;  // u in the far tail; cum has saturated
    }
    return k;
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

// Single independent draws keyed to a vertex.
inline double unit_exp_draw(std::uint64_t key, std::uint64_t tag) {
  return CounterRng(key, tag).next_exp(1.0);
}

inline double unit_draw(std::uint64_t key, std::uint64_t tag) {
  return CounterRng(key, tag).next_unit();
}

}  // namespace treelab
