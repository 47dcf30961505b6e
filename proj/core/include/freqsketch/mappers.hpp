#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "freqsketch/coefficients.hpp"
#include "freqsketch/core.hpp"
#include "freqsketch/random.hpp"

namespace freqsketch {

/// An output element. `value` is unused (0) for point mappings, the tail integral for
/// combination mappings and the raw exponential draw for full-range mappings.
struct OutputElement {
  std::uint64_t outkey = 0;
  double value = 0.0;

  friend bool operator==(const OutputElement&, const OutputElement&) = default;
};

struct MapperConfig {
  std::uint32_t r = 1;
  double t = 1.0;           // point
  CoefficientFunction a;    // combination
  double tau = 0.0;         // combination
  std::uint64_t seed = 0;
  unsigned outkey_bits = 64;
};

/// Replicas for a target relative error: ceil(e/(e-1) eps^{-2.5}), or 1 when the caller
/// knows SUM >= eps^{-2.5} MAX.
[[nodiscard]] std::uint32_t replicas_for(double epsilon, bool sum_dominates_max = false);

/// Maps input elements to output elements. Replica i of an element draws
/// y_i ~ Exp(value) from the stream keyed by (seed, ordinal, i); the point, combination
/// and full-range mappings share those draws.
class ElementMapper {
 public:
  explicit ElementMapper(MapperConfig cfg);

  [[nodiscard]] const MapperConfig& config() const noexcept { return cfg_; }

  /// Emits H_i(key) for each replica with y_i <= t.
  template <class Sink>
  void point(const Element& e, Ordinal ord, Sink&& sink) const {
    validate(e);
    const std::uint64_t ekey = rng_.element_key(ord);
    const std::uint64_t digest = OutKeyHasher::digest(e.key);
    for (std::uint32_t i = 0; i < cfg_.r; ++i) {
      DrawStream s = RandomnessSource::replica_stream(ekey, i);
      if (exp_draw(s, e.value) <= cfg_.t) sink(OutputElement{hasher_.outkey(digest, i), 0.0});
    }
  }

  /// Same output-set distribution as `point`, in time linear in the output size:
  /// K ~ Binomial(r, 1 - e^{-value t}), then K distinct replicas uniformly at random.
  /// Draws are not coupled with the other mappings.
  template <class Sink>
  void point_fast(const Element& e, Ordinal ord, Sink&& sink) const {
    validate(e);
    DrawStream s(mix64(rng_.element_key(ord) ^ 0x8f1bbcdcbfa53e0bULL));
    const std::uint64_t digest = OutKeyHasher::digest(e.key);
    sample_replicas(-std::expm1(-e.value * cfg_.t), s, [&](std::uint32_t i) {
      sink(OutputElement{hasher_.outkey(digest, i), 0.0});
    });
  }

  /// Emits (H_i(key), tail(a, max(tau, y_i))) when that value is positive.
  template <class Sink>
  void combination(const Element& e, Ordinal ord, Sink&& sink) const {
    validate(e);
    const std::uint64_t ekey = rng_.element_key(ord);
    const std::uint64_t digest = OutKeyHasher::digest(e.key);
    for (std::uint32_t i = 0; i < cfg_.r; ++i) {
      DrawStream s = RandomnessSource::replica_stream(ekey, i);
      const double y = exp_draw(s, e.value);
      const double v = cfg_.a.tail_integral(std::max(cfg_.tau, y));
      if (v > 0.0) sink(OutputElement{hasher_.outkey(digest, i), v});
    }
  }

  /// Emits (H_i(key), y_i) for every replica.
  template <class Sink>
  void full_range(const Element& e, Ordinal ord, Sink&& sink) const {
    validate(e);
    const std::uint64_t ekey = rng_.element_key(ord);
    const std::uint64_t digest = OutKeyHasher::digest(e.key);
    for (std::uint32_t i = 0; i < cfg_.r; ++i) {
      DrawStream s = RandomnessSource::replica_stream(ekey, i);
      sink(OutputElement{hasher_.outkey(digest, i), exp_draw(s, e.value)});
    }
  }

  [[nodiscard]] std::vector<OutputElement> map_point(const Element& e, Ordinal ord) const;
  [[nodiscard]] std::vector<OutputElement> map_point_fast(const Element& e, Ordinal ord) const;
  [[nodiscard]] std::vector<OutputElement> map_combination(const Element& e, Ordinal ord) const;
  [[nodiscard]] std::vector<OutputElement> map_full_range(const Element& e, Ordinal ord) const;

 private:
  template <class Emit>
  void sample_replicas(double p, DrawStream& s, Emit&& emit) const {
    const std::uint32_t k = binomial(p, s);
    if (k == 0) return;
    if (k == cfg_.r) {
      for (std::uint32_t i = 0; i < k; ++i) emit(i);
      return;
    }
    for (std::uint32_t i : distinct_indices(k, s)) emit(i);
  }

  std::uint32_t binomial(double p, DrawStream& s) const;
  // Floyd's sampling of k distinct indices from [0, r).
  const std::vector<std::uint32_t>& distinct_indices(std::uint32_t k, DrawStream& s) const;

  MapperConfig cfg_;
  RandomnessSource rng_;
  OutKeyHasher hasher_;
};

}  // namespace freqsketch
