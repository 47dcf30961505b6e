#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "freqsketch/coefficients.hpp"
#include "freqsketch/mappers.hpp"
#include "freqsketch/sketches.hpp"

namespace freqsketch {

struct PipelineConfig {
  double epsilon = 0.1;
  std::uint32_t r = 1;
  std::uint32_t k = 100;
  std::uint64_t seed = 0;
  unsigned outkey_bits = 64;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Distinct-count level 3 eps^{-2} below which point estimates fall back to t * SUM.
[[nodiscard]] double fallback_level(double epsilon);

/// Point measurement of LapM[W](t): distinct outkeys / r.
class PointPipeline {
 public:
  PointPipeline(PipelineConfig cfg, double t, bool fast_mapping = false);

  void ingest(const Element& e, Ordinal ord);
  void merge(const PointPipeline& other);

  /// dCount estimate / r, without fallback.
  [[nodiscard]] double measurement() const noexcept;
  [[nodiscard]] bool uses_fallback() const noexcept;
  /// measurement(), or t * SUM when the distinct estimate is below fallback_level.
  [[nodiscard]] double estimate() const noexcept;
  /// T * estimate(); requires the pipeline to run at t = 1/T.
  [[nodiscard]] double soft_cap_estimate(double T) const;

  [[nodiscard]] double t() const noexcept { return t_; }
  [[nodiscard]] const PipelineConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const DistinctCounter& counter() const noexcept { return dc_; }
  [[nodiscard]] const SumCounter& sum() const noexcept { return sum_; }
  [[nodiscard]] std::uint64_t outputs() const noexcept { return outputs_; }

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static PointPipeline deserialize(PipelineConfig cfg, double t, std::span<const std::uint8_t> bytes);

 private:
  PipelineConfig cfg_;
  double t_;
  bool fast_;
  ElementMapper mapper_;
  DistinctCounter dc_;
  SumCounter sum_;
  std::uint64_t outputs_ = 0;
};

/// Combination measurement of integral a(t) LapM[W](t) dt for a nonnegative a.
/// The l = ceil(3 eps^{-2}) outkeys with the smallest minimum draw y are sidelined; the
/// rest go to a max-distinct sketch with value tail(a, y). Finalization sets tau to the
/// largest sidelined y.
class CombinationPipeline {
 public:
  struct Result {
    double estimate;
    double tau;
    double max_distinct;  // max-distinct estimate including the sidelined keys
    double head_term;     // SUM * head(a, tau)
  };

  CombinationPipeline(PipelineConfig cfg, CoefficientFunction a);

  void ingest(const Element& e, Ordinal ord);
  /// Accepts a full-range output element (outkey, raw draw y).
  void ingest_output(const OutputElement& o);
  void merge(const CombinationPipeline& other);

  /// md/r + SUM * head(a, tau). Read-only and repeatable.
  [[nodiscard]] Result finalize() const;
  [[nodiscard]] double estimate() const { return finalize().estimate; }

  [[nodiscard]] std::size_t sideline_capacity() const noexcept { return capacity_; }
  [[nodiscard]] std::size_t sidelined() const noexcept { return by_key_.size(); }
  [[nodiscard]] const PipelineConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const CoefficientFunction& coefficients() const noexcept { return a_; }
  [[nodiscard]] const SumCounter& sum() const noexcept { return sum_; }
  [[nodiscard]] std::uint64_t outputs() const noexcept { return outputs_; }

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static CombinationPipeline deserialize(PipelineConfig cfg, CoefficientFunction a,
                                                       std::span<const std::uint8_t> bytes);

 private:
  void feed(std::uint64_t outkey, double y);

  PipelineConfig cfg_;
  CoefficientFunction a_;
  std::size_t capacity_;
  ElementMapper mapper_;
  MaxDistinctSketch md_;
  SumCounter sum_;
  absl::flat_hash_map<std::uint64_t, double> by_key_;
  std::set<std::pair<double, std::uint64_t>> by_y_;
  std::uint64_t outputs_ = 0;
};

/// Full-range measurement: an all-threshold sketch over (outkey, y) answers point
/// queries at any t and combination queries for any a.
class FullRangePipeline {
 public:
  explicit FullRangePipeline(PipelineConfig cfg);

  void ingest(const Element& e, Ordinal ord);
  void ingest_output(const OutputElement& o);
  void merge(const FullRangePipeline& other);

  /// Same rule as PointPipeline::estimate at threshold t.
  [[nodiscard]] double estimate_point(double t) const;
  /// integral a(t) F(t) dt, where F is the sketch's step profile / r and F(t) = t * SUM
  /// below the first step reaching fallback_level. Summed exactly over the steps.
  [[nodiscard]] double estimate_combination(const CoefficientFunction& a) const;
  /// linear * SUM + plus - minus, each side through estimate_combination.
  [[nodiscard]] std::pair<double, double> estimate_signed_parts(const SignedCoefficientFunction& a) const;

  [[nodiscard]] const PipelineConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const AllThresholdSketch& sketch() const noexcept { return at_; }
  [[nodiscard]] const SumCounter& sum() const noexcept { return sum_; }
  [[nodiscard]] std::uint64_t outputs() const noexcept { return outputs_; }

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static FullRangePipeline deserialize(PipelineConfig cfg, std::span<const std::uint8_t> bytes);

 private:
  PipelineConfig cfg_;
  ElementMapper mapper_;
  AllThresholdSketch at_;
  SumCounter sum_;
  std::uint64_t outputs_ = 0;
};

struct SignedEstimate {
  double value = 0.0;
  double rho = 1.0;
  /// Relative error bound rho * (eps_plus + eps_minus).
  double error_bound = 0.0;
  /// The raw difference was negative and has been clamped to 0.
  bool clamped = false;
};

/// plus - minus with the rho certificate of `a`. eps_minus is ignored when a has no
/// negative part.
[[nodiscard]] SignedEstimate signed_estimate(double plus_result, double minus_result,
                                             const SignedCoefficientFunction& a, double eps_plus,
                                             double eps_minus);

}  // namespace freqsketch
