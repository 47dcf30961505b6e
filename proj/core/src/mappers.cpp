#include "freqsketch/mappers.hpp"

#include <random>

#include "freqsketch/error.hpp"

namespace freqsketch {

std::uint32_t replicas_for(double epsilon, bool sum_dominates_max) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (sum_dominates_max) return 1;
  const double e = std::exp(1.0);
  return static_cast<std::uint32_t>(std::ceil(e / (e - 1.0) * std::pow(epsilon, -2.5)));
}

ElementMapper::ElementMapper(MapperConfig cfg)
    : cfg_(std::move(cfg)), rng_(cfg_.seed), hasher_(cfg_.outkey_bits) {
  if (cfg_.r == 0) throw InvalidArgument("replica count r must be >= 1");
  if (!(cfg_.t >= 0.0)) throw InvalidArgument("threshold t must be >= 0");
  if (!(cfg_.tau >= 0.0) || !std::isfinite(cfg_.tau)) throw InvalidArgument("tau must be finite and >= 0");
}

std::uint32_t ElementMapper::binomial(double p, DrawStream& s) const {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return cfg_.r;
  thread_local std::binomial_distribution<std::uint32_t> dist;
  if (dist.t() != cfg_.r || dist.p() != p) {
    dist.param(std::binomial_distribution<std::uint32_t>::param_type(cfg_.r, p));
  }
  dist.reset();
  return dist(s);
}

const std::vector<std::uint32_t>& ElementMapper::distinct_indices(std::uint32_t k, DrawStream& s) const {
  thread_local std::vector<std::uint32_t> picked;
  thread_local std::vector<std::uint64_t> bitmap;
  picked.clear();
  bitmap.assign((cfg_.r + 63) / 64, 0);
  auto test_and_set = [&](std::uint32_t i) {
    const std::uint64_t bit = 1ULL << (i & 63);
    const bool was = bitmap[i >> 6] & bit;
    bitmap[i >> 6] |= bit;
    return was;
  };
  for (std::uint32_t j = cfg_.r - k; j < cfg_.r; ++j) {
    std::uniform_int_distribution<std::uint32_t> pick(0, j);
    const std::uint32_t c = pick(s);
    const std::uint32_t chosen = test_and_set(c) ? j : c;
    if (chosen == j) test_and_set(j);
    picked.push_back(chosen);
  }
  return picked;
}

std::vector<OutputElement> ElementMapper::map_point(const Element& e, Ordinal ord) const {
  std::vector<OutputElement> out;
  point(e, ord, [&](const OutputElement& o) { out.push_back(o); });
  return out;
}

std::vector<OutputElement> ElementMapper::map_point_fast(const Element& e, Ordinal ord) const {
  std::vector<OutputElement> out;
  point_fast(e, ord, [&](const OutputElement& o) { out.push_back(o); });
  return out;
}

std::vector<OutputElement> ElementMapper::map_combination(const Element& e, Ordinal ord) const {
  std::vector<OutputElement> out;
  combination(e, ord, [&](const OutputElement& o) { out.push_back(o); });
  return out;
}

std::vector<OutputElement> ElementMapper::map_full_range(const Element& e, Ordinal ord) const {
  std::vector<OutputElement> out;
  full_range(e, ord, [&](const OutputElement& o) { out.push_back(o); });
  return out;
}

}  // namespace freqsketch
