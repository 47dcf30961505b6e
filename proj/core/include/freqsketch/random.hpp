#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace freqsketch {

/// splitmix64 finalizer; a bijection on 64-bit words with full avalanche.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Maps 64 random bits to a double strictly inside (0, 1).
[[nodiscard]] constexpr double unit_open(std::uint64_t bits) noexcept {
  // 52 bits so the largest result, 1 - 2^-53, is representable.
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Position of an input element in the randomness space. Shards use distinct nonces.
struct Ordinal {
  std::uint64_t shard = 0;
  std::uint64_t index = 0;
};

/// Counter-based generator for one (seed, ordinal, replica) triple.
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class DrawStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr DrawStream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Next uniform draw in (0, 1).
  constexpr double uniform() noexcept { return unit_open((*this)()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Deterministic randomness keyed by (seed, ordinal, replica). Identical triples give
/// identical draws across runs and processes; nothing is shared or mutated.
class RandomnessSource {
 public:
  explicit RandomnessSource(std::uint64_t seed) noexcept;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  /// Per-element key; derive replica streams from it with `replica_stream`.
  [[nodiscard]] std::uint64_t element_key(Ordinal ordinal) const noexcept;

  [[nodiscard]] static DrawStream replica_stream(std::uint64_t element_key, std::uint32_t replica) noexcept {
    return DrawStream(mix64(element_key ^ ((static_cast<std::uint64_t>(replica) + 1) * 0xd6e8feb86659fd93ULL)));
  }

  [[nodiscard]] DrawStream stream(Ordinal ordinal, std::uint32_t replica) const noexcept {
    return replica_stream(element_key(ordinal), replica);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t seed_key_;
};

/// y = -ln(u) / rate. Throws InvalidArgument unless rate is finite and > 0.
[[nodiscard]] double exp_from_uniform(double u, double rate);

/// Draws y ~ Exp(rate) from the next uniform of `stream`.
[[nodiscard]] double exp_draw(DrawStream& stream, double rate);

/// Output-key hash family H_i(key). Outkeys are independent of the run seed; they only
/// need to be (nearly) unique per (key, replica).
class OutKeyHasher {
 public:
  explicit OutKeyHasher(unsigned bits = 64);

  [[nodiscard]] unsigned bits() const noexcept { return bits_; }

  /// 64-bit digest of the key bytes (FNV-1a, then mixed).
  [[nodiscard]] static std::uint64_t digest(std::string_view key) noexcept;

  [[nodiscard]] std::uint64_t outkey(std::uint64_t key_digest, std::uint32_t replica) const noexcept {
    const std::uint64_t h =
        mix64(key_digest + (static_cast<std::uint64_t>(replica) + 1) * 0x9e3779b97f4a7c15ULL);
    return h & mask_;
  }

  [[nodiscard]] std::uint64_t outkey(std::string_view key, std::uint32_t replica) const noexcept {
    return outkey(digest(key), replica);
  }

 private:
  unsigned bits_;
  std::uint64_t mask_;
};

/// Consistent uniform u_x in (0, 1) for an outkey under a sketch seed.
[[nodiscard]] constexpr double outkey_uniform(std::uint64_t outkey, std::uint64_t seed) noexcept {
  return unit_open(mix64(outkey ^ mix64(seed ^ 0x2545f4914f6cdd1dULL)));
}

/// Exp(1) rank -ln(u_x) of an outkey.
[[nodiscard]] double outkey_rank(std::uint64_t outkey, std::uint64_t seed) noexcept;

}  // namespace freqsketch
