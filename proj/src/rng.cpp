#include "pnest/rng.hpp"

namespace pnest {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t sweep_index,
                         std::uint64_t trial_index, StreamId stream) {
  return derive_seed({master_seed, sweep_index, trial_index, static_cast<std::uint64_t>(stream)});
}

}  // namespace pnest
