#pragma once

#include <cstdint>

namespace ldp {

/// Counter-based 64-bit generator. Output i of stream (seed, stream) is a
/// pure function of (seed, stream, i), so replicas can be assigned fixed
/// streams and results never depend on scheduling or thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x6a09e667f3bcc909ull) ^ mix(stream + 0x9e3779b97f4a7c15ull)),
        counter_(0) {}

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ull;
    return mix(key_ + counter_);
  }

  /// Uniform in [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Samples an index from a discrete distribution given as cumulative
  /// weights (last entry is the total mass).
  template <typename Cum>
  int next_categorical(const Cum& cumulative) {
    double u = next_double() * cumulative.back();
    int lo = 0, hi = static_cast<int>(cumulative.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (u < cumulative[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

} // namespace ldp
