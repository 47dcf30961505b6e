#include "freqsketch/core.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "freqsketch/error.hpp"

namespace freqsketch {

void validate(const Element& e) {
  if (e.key.empty()) throw InvalidArgument("element key must be nonempty");
  if (!std::isfinite(e.value) || !(e.value > 0.0)) {
    throw InvalidArgument("element value must be finite and > 0 (key '" + e.key + "')");
  }
}

FrequencyDistribution::FrequencyDistribution(Entries entries) {
  for (const auto& [w, c] : entries) add(w, c);
}

void FrequencyDistribution::add(double weight, std::uint64_t count) {
  if (!std::isfinite(weight) || !(weight > 0.0)) throw InvalidArgument("weight must be finite and > 0");
  if (count == 0) throw InvalidArgument("key count must be >= 1");
  entries_[weight] += count;
  distinct_ += count;
}

double FrequencyDistribution::sum() const noexcept {
  double s = 0.0;
  for (const auto& [w, c] : entries_) s += w * static_cast<double>(c);
  return s;
}

double FrequencyDistribution::max() const noexcept {
  return entries_.empty() ? 0.0 : entries_.rbegin()->first;
}

double FrequencyDistribution::min() const noexcept {
  return entries_.empty() ? 0.0 : entries_.begin()->first;
}

FrequencyDistribution aggregate(std::span<const Element> elements) {
  absl::flat_hash_map<std::string_view, std::vector<double>> per_key;
  for (const auto& e : elements) {
    validate(e);
    per_key[e.key].push_back(e.value);
  }
  FrequencyDistribution dist;
  for (auto& [key, values] : per_key) {
    std::sort(values.begin(), values.end());
    double w = 0.0;
    for (double v : values) w += v;
    dist.add(w);
  }
  return dist;
}

}  // namespace freqsketch
