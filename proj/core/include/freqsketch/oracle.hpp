#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "freqsketch/core.hpp"
#include "freqsketch/mappers.hpp"
#include "freqsketch/statistic.hpp"

namespace freqsketch {

/// sum_w W(w) f(w).
[[nodiscard]] double exact_statistic(const FrequencyDistribution& dist, const StatisticSpec& spec);

struct MeasurementMode {
  enum class Kind { distinct, max_distinct, threshold } kind = Kind::distinct;
  double t = 0.0;  // threshold only

  static MeasurementMode distinct() { return {Kind::distinct, 0.0}; }
  static MeasurementMode max_distinct() { return {Kind::max_distinct, 0.0}; }
  static MeasurementMode threshold(double t) { return {Kind::threshold, t}; }
};

/// Exact dCount, sum_x m_x, or number of outkeys with some value <= t.
[[nodiscard]] double exact_measurement(std::span<const OutputElement> outputs, MeasurementMode mode);

/// Zipf over ranks 1..n_keys with P(rank) proportional to rank^{-alpha}, by inverse CDF.
class ZipfSampler {
 public:
  explicit ZipfSampler(double alpha, std::uint64_t n_keys = 1'000'000);

  /// Rank in [1, n_keys].
  template <class Rng>
  std::uint64_t operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cdf_.back())(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cdf_.begin()), cdf_.size() - 1) + 1;
  }

  /// Probability of `rank`.
  [[nodiscard]] double probability(std::uint64_t rank) const;
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::uint64_t n_keys() const noexcept { return cdf_.size(); }

 private:
  double alpha_;
  std::vector<double> cdf_;  // unnormalized cumulative weights
};

/// n elements with decimal-rank keys drawn from `sampler` and value 1.
[[nodiscard]] std::vector<Element> zipf_generate(std::size_t n, const ZipfSampler& sampler, std::uint64_t seed);
[[nodiscard]] std::vector<Element> zipf_generate(std::size_t n, double alpha, std::uint64_t n_keys,
                                                 std::uint64_t seed);

}  // namespace freqsketch
