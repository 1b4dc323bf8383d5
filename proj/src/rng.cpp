#include "kwex/rng.hpp"

namespace kwex {

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (stream_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace kwex
