#include "freqsketch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "freqsketch/error.hpp"

namespace freqsketch {

double exact_statistic(const FrequencyDistribution& dist, const StatisticSpec& spec) {
  double total = 0.0;
  for (const auto& [w, c] : dist.entries()) total += static_cast<double>(c) * spec.evaluate(w);
  return total;
}

double exact_measurement(std::span<const OutputElement> outputs, MeasurementMode mode) {
  switch (mode.kind) {
    case MeasurementMode::Kind::distinct: {
      absl::flat_hash_set<std::uint64_t> keys;
      for (const auto& o : outputs) keys.insert(o.outkey);
      return static_cast<double>(keys.size());
    }
    case MeasurementMode::Kind::max_distinct: {
      absl::flat_hash_map<std::uint64_t, double> best;
      for (const auto& o : outputs) {
        auto [it, fresh] = best.emplace(o.outkey, o.value);
        if (!fresh) it->second = std::max(it->second, o.value);
      }
      std::vector<double> values;
      values.reserve(best.size());
      for (const auto& [k, v] : best) values.push_back(v);
      std::sort(values.begin(), values.end());
      double total = 0.0;
      for (double v : values) total += v;
      return total;
    }
    case MeasurementMode::Kind::threshold: {
      absl::flat_hash_set<std::uint64_t> keys;
      for (const auto& o : outputs) {
        if (o.value <= mode.t) keys.insert(o.outkey);
      }
      return static_cast<double>(keys.size());
    }
  }
  return 0.0;
}

ZipfSampler::ZipfSampler(double alpha, std::uint64_t n_keys) : alpha_(alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("Zipf alpha must be > 0");
  if (n_keys == 0) throw InvalidArgument("Zipf key universe must be nonempty");
  cdf_.resize(n_keys);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < n_keys; ++i) {
    acc += std::pow(static_cast<double>(i + 1), -alpha);
    cdf_[i] = acc;
  }
}

double ZipfSampler::probability(std::uint64_t rank) const {
  if (rank == 0 || rank > cdf_.size()) return 0.0;
  return std::pow(static_cast<double>(rank), -alpha_) / cdf_.back();
}

std::vector<Element> zipf_generate(std::size_t n, const ZipfSampler& sampler, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Element> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(Element{std::to_string(sampler(rng)), 1.0});
  return out;
}

std::vector<Element> zipf_generate(std::size_t n, double alpha, std::uint64_t n_keys, std::uint64_t seed) {
  return zipf_generate(n, ZipfSampler(alpha, n_keys), seed);
}

}  // namespace freqsketch
