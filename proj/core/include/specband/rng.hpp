#pragma once

#include <cstdint>

namespace specband {

//! SplitMix64 finalizer: a fixed bijective mixing of a 64-bit word.
//! Used to decorrelate per-trial seeds derived from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Sub-seed for trial `index` under master seed `seed`.
//!
//! Rule: seed XOR splitmix64(index), re-mixed once.  The same (seed, index)
//! pair always yields the same sub-seed, independent of how trials are
//! scheduled across threads, which keeps parallel runs byte-reproducible.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

}  // namespace specband
