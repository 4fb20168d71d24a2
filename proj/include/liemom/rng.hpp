#pragma once

#include <cstdint>
#include <random>

namespace liemom {

// splitmix64 step; used to decorrelate per-stream seeds derived from a base
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-derived seed for an independent stream: deterministic in
// (base_seed, index) and invariant under the parallel schedule.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t s = base_seed ^ (0xd1342543de82ef95ull * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

inline std::mt19937_64 make_stream(std::uint64_t base_seed, std::uint64_t index) {
  return std::mt19937_64(derive_stream_seed(base_seed, index));
}

}  // namespace liemom
