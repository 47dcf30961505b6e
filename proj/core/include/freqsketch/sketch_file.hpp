#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freqsketch/estimators.hpp"
#include "freqsketch/statistic.hpp"

namespace freqsketch {

enum class BuildMode : std::uint8_t { point = 1, combination = 2, fullrange = 3 };

[[nodiscard]] BuildMode parse_build_mode(std::string_view name);
[[nodiscard]] std::string to_string(BuildMode mode);

struct SketchHeader {
  BuildMode mode = BuildMode::point;
  std::string statistic;
  PipelineConfig config;
  std::uint64_t elements = 0;
};

/// A statistic estimator persisted as "FSK1" header + component pipelines.
///   point:       one point pipeline per delta location of the estimation plan
///   combination: a combination pipeline for a+ and, if signed, one for a-
///   fullrange:   one full-range pipeline, queryable for any statistic
/// All components share the seed, so signed parts see coupled draws.
class SketchFile {
 public:
  struct Estimate {
    double value = 0.0;
    double plus = 0.0;
    double minus = 0.0;
    bool is_signed = false;
    SignedEstimate certificate;
  };

  SketchFile(BuildMode mode, const StatisticSpec& statistic, PipelineConfig config);

  void ingest(const Element& e, Ordinal ord);
  /// Throws IncompatibleSketch naming the first differing header field.
  void merge(const SketchFile& other);

  /// Estimate of the file's statistic.
  [[nodiscard]] Estimate estimate() const;
  /// Estimate of another statistic; full-range files only.
  [[nodiscard]] Estimate estimate(const StatisticSpec& statistic) const;
  /// LapM[W](t) point query; full-range files only.
  [[nodiscard]] double estimate_point(double t) const;

  [[nodiscard]] const SketchHeader& header() const noexcept { return header_; }
  [[nodiscard]] const StatisticSpec& statistic() const noexcept { return spec_; }
  [[nodiscard]] const SignedCoefficientFunction& plan() const noexcept { return plan_; }
  /// Output elements generated across all components.
  [[nodiscard]] std::uint64_t outputs() const noexcept;

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static SketchFile deserialize(std::span<const std::uint8_t> bytes);

  void save(const std::string& path) const;
  [[nodiscard]] static SketchFile load(const std::string& path);

 private:
  Estimate combine(double plus, double minus, const SignedCoefficientFunction& plan) const;

  SketchHeader header_;
  StatisticSpec spec_;
  SignedCoefficientFunction plan_;
  SumCounter sum_;
  std::vector<PointPipeline> points_;       // plus deltas, then minus deltas
  std::vector<CombinationPipeline> combos_;  // plus, then minus
  std::optional<FullRangePipeline> full_;
};

}  // namespace freqsketch
