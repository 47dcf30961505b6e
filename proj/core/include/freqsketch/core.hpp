#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace freqsketch {

/// A raw stream record. Elements sharing a key add up to that key's weight.
struct Element {
  std::string key;
  double value = 1.0;
};

/// Throws InvalidArgument unless the key is nonempty and the value is finite and > 0.
void validate(const Element& e);

/// Histogram of key weights: weight -> number of keys with exactly that weight.
class FrequencyDistribution {
 public:
  using Entries = std::map<double, std::uint64_t>;

  FrequencyDistribution() = default;
  explicit FrequencyDistribution(Entries entries);

  void add(double weight, std::uint64_t count = 1);

  [[nodiscard]] const Entries& entries() const noexcept { return entries_; }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

  /// Number of keys (dCount).
  [[nodiscard]] std::uint64_t distinct() const noexcept { return distinct_; }
  /// Sum of key weights (SUM), accumulated in ascending weight order.
  [[nodiscard]] double sum() const noexcept;
  /// Largest key weight, 0 when empty.
  [[nodiscard]] double max() const noexcept;
  /// Smallest key weight, 0 when empty.
  [[nodiscard]] double min() const noexcept;

  friend bool operator==(const FrequencyDistribution& a, const FrequencyDistribution& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Entries entries_;
  std::uint64_t distinct_ = 0;
};

/// Sums values per key and histograms the resulting weights.
/// The result does not depend on element order: per-key values are summed in sorted order.
FrequencyDistribution aggregate(std::span<const Element> elements);

}  // namespace freqsketch
