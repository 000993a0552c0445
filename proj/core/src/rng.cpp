#include "migsim/rng.hpp"

namespace migsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  // Two finalizer rounds over a combined word; avoids the low-entropy
  // collisions of plain master + index.
  return splitmix64(splitmix64(master) ^ (0x9E3779B97F4A7C15ull * (index + 1)));
}

}  // namespace migsim
