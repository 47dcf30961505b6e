#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "freqsketch/mappers.hpp"

namespace freqsketch {

/// 64.64 fixed-point accumulator word.
__extension__ typedef unsigned __int128 uint128_t;

enum class SketchType : std::uint8_t { distinct = 1, max_distinct = 2, all_threshold = 3, sum = 4 };

/// Bottom-k distinct counter over Exp(1) ranks -ln(u_outkey).
/// Entries are sorted by (rank, outkey) and hold the k smallest.
class DistinctCounter {
 public:
  struct Entry {
    double rank;
    std::uint64_t outkey;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  DistinctCounter(std::uint32_t k, std::uint64_t seed);

  void update(std::uint64_t outkey);
  void merge(const DistinctCounter& other);
  [[nodiscard]] static DistinctCounter merged(const DistinctCounter& a, const DistinctCounter& b);

  /// Exact count below k entries, otherwise (k-1)/(1 - e^{-rank_k}).
  [[nodiscard]] double estimate() const noexcept;
  [[nodiscard]] bool exact() const noexcept { return entries_.size() < k_; }

  [[nodiscard]] std::uint32_t k() const noexcept { return k_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static DistinctCounter deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const DistinctCounter&, const DistinctCounter&) = default;

 private:
  void insert(Entry e);

  std::uint32_t k_;
  std::uint64_t seed_;
  std::vector<Entry> entries_;
};

/// Bottom-k sketch of the max-distinct statistic sum_x m_x. A key with maximum value m
/// has rank -ln(u_outkey)/m; entries are the k smallest ranks, sorted by (rank, outkey).
class MaxDistinctSketch {
 public:
  struct Entry {
    double rank;
    std::uint64_t outkey;
    double value;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  MaxDistinctSketch(std::uint32_t k, std::uint64_t seed);

  /// Ignores nonpositive values.
  void update(const OutputElement& e);
  void update(std::uint64_t outkey, double value) { update(OutputElement{outkey, value}); }
  void merge(const MaxDistinctSketch& other);
  [[nodiscard]] static MaxDistinctSketch merged(const MaxDistinctSketch& a, const MaxDistinctSketch& b);

  /// Exact sum below k keys, otherwise sum over the k-1 smallest of m/(1 - e^{-m rank_k}).
  [[nodiscard]] double estimate() const noexcept;
  [[nodiscard]] bool exact() const noexcept { return entries_.size() < k_; }

  [[nodiscard]] std::uint32_t k() const noexcept { return k_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static MaxDistinctSketch deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const MaxDistinctSketch& a, const MaxDistinctSketch& b) {
    return a.k_ == b.k_ && a.seed_ == b.seed_ && a.entries_ == b.entries_;
  }

 private:
  std::uint32_t k_;
  std::uint64_t seed_;
  std::vector<Entry> entries_;
  absl::flat_hash_map<std::uint64_t, double> values_;  // outkey -> m for stored entries
};

/// All-threshold (all-distance) sketch. Each key keeps y = its minimum value. A key is
/// retained iff fewer than k keys preceding it in (y, rank, outkey) order have a smaller
/// rank, so for every t the retained keys with y <= t contain the k smallest-rank keys
/// among all keys with y <= t.
class AllThresholdSketch {
 public:
  struct Entry {
    double y;
    double rank;
    std::uint64_t outkey;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  /// Estimate valid on [y, next breakpoint).
  struct Step {
    double y;
    double estimate;
  };

  AllThresholdSketch(std::uint32_t k, std::uint64_t seed);

  void update(const OutputElement& e);
  void update(std::uint64_t outkey, double y) { update(OutputElement{outkey, y}); }
  void merge(const AllThresholdSketch& other);
  [[nodiscard]] static AllThresholdSketch merged(const AllThresholdSketch& a, const AllThresholdSketch& b);

  /// Estimated number of keys with y <= t; nondecreasing in t.
  [[nodiscard]] double estimate(double t) const;
  /// Step function t -> estimate(t), one step per distinct retained y, ascending.
  [[nodiscard]] const std::vector<Step>& profile() const;

  [[nodiscard]] std::uint32_t k() const noexcept { return k_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  /// Retained entries in (y, rank, outkey) order.
  [[nodiscard]] const std::vector<Entry>& entries() const;

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static AllThresholdSketch deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const AllThresholdSketch& a, const AllThresholdSketch& b) {
    return a.k_ == b.k_ && a.seed_ == b.seed_ && a.entries() == b.entries();
  }

 private:
  void compact() const;

  std::uint32_t k_;
  std::uint64_t seed_;
  mutable std::vector<Entry> entries_;
  mutable std::vector<Entry> buffer_;
  mutable std::vector<Step> profile_;
  mutable std::vector<double> kth_;  // k-th smallest rank at each step, +inf below k keys
};

/// Exact SUM accumulator in 64.64 unsigned fixed point; integer addition keeps merges
/// bit-exact under any partitioning. Values are quantized to 2^-64.
class SumCounter {
 public:
  /// Throws InvalidArgument for negative or non-finite values and OverflowError (after
  /// saturating) when the total would reach 2^64.
  void update(double value);
  void merge(const SumCounter& other);
  [[nodiscard]] static SumCounter merged(const SumCounter& a, const SumCounter& b);

  [[nodiscard]] double value() const noexcept;
  [[nodiscard]] bool saturated() const noexcept;

  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  [[nodiscard]] static SumCounter deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const SumCounter&, const SumCounter&) = default;

 private:
  void add_fixed(uint128_t v);

  uint128_t total_ = 0;
};

}  // namespace freqsketch
