#include "freqsketch/random.hpp"

#include <cmath>

#include "freqsketch/error.hpp"

namespace freqsketch {

RandomnessSource::RandomnessSource(std::uint64_t seed) noexcept
    : seed_(seed), seed_key_(mix64(seed + 0x60642e2a34326f15ULL)) {}

std::uint64_t RandomnessSource::element_key(Ordinal ordinal) const noexcept {
  std::uint64_t h = mix64(seed_key_ ^ (ordinal.shard * 0xc2b2ae3d27d4eb4fULL + 0x165667b19e3779f9ULL));
  return mix64(h ^ ordinal.index);
}

double exp_from_uniform(double u, double rate) {
  if (!std::isfinite(rate) || !(rate > 0.0)) throw InvalidArgument("exponential rate must be finite and > 0");
  return -std::log(u) / rate;
}

double exp_draw(DrawStream& stream, double rate) { return exp_from_uniform(stream.uniform(), rate); }

OutKeyHasher::OutKeyHasher(unsigned bits) : bits_(bits) {
  if (bits < 16 || bits > 64) throw InvalidArgument("outkey bits must be in [16, 64]");
  mask_ = bits == 64 ? ~0ULL : ((1ULL << bits) - 1);
}

std::uint64_t OutKeyHasher::digest(std::string_view key) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h ^ key.size());
}

double outkey_rank(std::uint64_t outkey, std::uint64_t seed) noexcept {
  return -std::log(outkey_uniform(outkey, seed));
}

}  // namespace freqsketch
