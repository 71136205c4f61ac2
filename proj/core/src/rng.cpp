#include "freqbias/rng.hpp"

namespace freqbias {

std::uint64_t stage_seed(std::uint64_t master, std::string_view stage) {
  // FNV-1a 64-bit over the stage name.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stage) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(master, h);
}

}  // namespace freqbias
