#include "freqsketch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freqsketch/error.hpp"
#include "freqsketch/serialization.hpp"

namespace freqsketch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const PipelineConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (cfg.r == 0) throw InvalidArgument("replica count r must be >= 1");
  if (cfg.k < 2) throw InvalidArgument("sketch k must be >= 2");
}

void check_mergeable(const PipelineConfig& a, const PipelineConfig& b) {
  if (a.epsilon != b.epsilon) throw IncompatibleSketch("epsilon");
  if (a.r != b.r) throw IncompatibleSketch("r");
  if (a.k != b.k) throw IncompatibleSketch("k");
  if (a.seed != b.seed) throw IncompatibleSketch("seed");
  if (a.outkey_bits != b.outkey_bits) throw IncompatibleSketch("outkey_bits");
}

MapperConfig mapper_config(const PipelineConfig& cfg, double t) {
  MapperConfig m;
  m.r = cfg.r;
  m.t = t;
  m.seed = cfg.seed;
  m.outkey_bits = cfg.outkey_bits;
  return m;
}

void check_done(const ByteReader& r) {
  if (!r.done()) throw ParseError("trailing bytes after pipeline");
}

// Integral of t a(t) over [0, tau).
double head_exclusive(const CoefficientFunction& a, double tau) {
  double h = a.head_integral(tau);
  for (const auto& d : a.deltas()) {
    if (d.location == tau) h -= d.mass * d.location;
  }
  return std::max(h, 0.0);
}

}  // namespace

double fallback_level(double epsilon) { return 3.0 / (epsilon * epsilon); }

// ---------------------------------------------------------------- PointPipeline

PointPipeline::PointPipeline(PipelineConfig cfg, double t, bool fast_mapping)
    : cfg_(cfg), t_(t), fast_(fast_mapping), mapper_(mapper_config(cfg, t)), dc_(cfg.k, cfg.seed) {
  check_config(cfg_);
  if (!(t > 0.0)) throw InvalidArgument("point threshold t must be > 0");
}

void PointPipeline::ingest(const Element& e, Ordinal ord) {
  auto sink = [this](const OutputElement& o) {
    ++outputs_;
    dc_.update(o.outkey);
  };
  if (fast_) {
    mapper_.point_fast(e, ord, sink);
  } else {
    mapper_.point(e, ord, sink);
  }
  sum_.update(e.value);
}

void PointPipeline::merge(const PointPipeline& other) {
  check_mergeable(cfg_, other.cfg_);
  if (t_ != other.t_) throw IncompatibleSketch("t");
  dc_.merge(other.dc_);
  sum_.merge(other.sum_);
  outputs_ += other.outputs_;
}

double PointPipeline::measurement() const noexcept { return dc_.estimate() / cfg_.r; }

bool PointPipeline::uses_fallback() const noexcept { return dc_.estimate() < fallback_level(cfg_.epsilon); }

double PointPipeline::estimate() const noexcept { return uses_fallback() ? t_ * sum_.value() : measurement(); }

double PointPipeline::soft_cap_estimate(double T) const {
  if (!(T > 0.0) || std::abs(t_ * T - 1.0) > 1e-12) {
    throw InvalidArgument("soft cap estimate needs a pipeline built at t = 1/T");
  }
  return T * estimate();
}

std::vector<std::uint8_t> PointPipeline::serialize() const {
  ByteWriter w;
  w.u64(outputs_);
  w.bytes(dc_.serialize());
  w.bytes(sum_.serialize());
  return std::move(w).take();
}

PointPipeline PointPipeline::deserialize(PipelineConfig cfg, double t, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  PointPipeline p(cfg, t);
  p.outputs_ = r.u64();
  p.dc_ = DistinctCounter::deserialize(r.bytes());
  p.sum_ = SumCounter::deserialize(r.bytes());
  check_done(r);
  if (p.dc_.k() != cfg.k || p.dc_.seed() != cfg.seed) throw ParseError("pipeline sketch disagrees with its header");
  return p;
}

// ---------------------------------------------------------------- CombinationPipeline

CombinationPipeline::CombinationPipeline(PipelineConfig cfg, CoefficientFunction a)
    : cfg_(cfg),
      a_(std::move(a)),
      capacity_(static_cast<std::size_t>(std::ceil(fallback_level(cfg.epsilon)))),
      mapper_(mapper_config(cfg, 0.0)),
      md_(cfg.k, cfg.seed) {
  check_config(cfg_);
}

void CombinationPipeline::ingest(const Element& e, Ordinal ord) {
  mapper_.full_range(e, ord, [this](const OutputElement& o) {
    ++outputs_;
    ingest_output(o);
  });
  sum_.update(e.value);
}

void CombinationPipeline::feed(std::uint64_t outkey, double y) { md_.update(outkey, a_.tail_integral(y)); }

void CombinationPipeline::ingest_output(const OutputElement& o) {
  const double y = o.value;
  if (!(y > 0.0) || !std::isfinite(y)) throw InvalidArgument("combination draws must be finite and > 0");
  if (auto it = by_key_.find(o.outkey); it != by_key_.end()) {
    // Larger draws of a sidelined key are dominated by its finalization value.
    if (y < it->second) {
      by_y_.erase({it->second, o.outkey});
      it->second = y;
      by_y_.emplace(y, o.outkey);
    }
    return;
  }
  if (by_key_.size() < capacity_) {
    by_key_.emplace(o.outkey, y);
    by_y_.emplace(y, o.outkey);
    return;
  }
  const auto last = std::prev(by_y_.end());
  if (std::pair(y, o.outkey) < *last) {
    const auto [evicted_y, evicted_key] = *last;
    by_y_.erase(last);
    by_key_.erase(evicted_key);
    feed(evicted_key, evicted_y);
    by_key_.emplace(o.outkey, y);
    by_y_.emplace(y, o.outkey);
  } else {
    feed(o.outkey, y);
  }
}

void CombinationPipeline::merge(const CombinationPipeline& other) {
  check_mergeable(cfg_, other.cfg_);
  md_.merge(other.md_);
  sum_.merge(other.sum_);
  outputs_ += other.outputs_;
  for (const auto& [y, key] : other.by_y_) ingest_output(OutputElement{key, y});
}

CombinationPipeline::Result CombinationPipeline::finalize() const {
  if (by_y_.empty()) {
    const double md = md_.estimate();
    return {md / cfg_.r, 0.0, md, 0.0};
  }
  const double tau = by_y_.rbegin()->first;
  MaxDistinctSketch md = md_;
  const double v = a_.tail_integral(tau);
  for (const auto& [y, key] : by_y_) md.update(key, v);
  const double mdc = md.estimate();
  const double head = sum_.value() * a_.head_integral(tau);
  return {mdc / cfg_.r + head, tau, mdc, head};
}

std::vector<std::uint8_t> CombinationPipeline::serialize() const {
  ByteWriter w;
  w.u64(outputs_);
  w.bytes(md_.serialize());
  w.bytes(sum_.serialize());
  w.u64(by_y_.size());
  for (const auto& [y, key] : by_y_) {
    w.u64(key);
    w.f64(y);
  }
  return std::move(w).take();
}

CombinationPipeline CombinationPipeline::deserialize(PipelineConfig cfg, CoefficientFunction a,
                                                     std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  CombinationPipeline p(cfg, std::move(a));
  p.outputs_ = r.u64();
  p.md_ = MaxDistinctSketch::deserialize(r.bytes());
  p.sum_ = SumCounter::deserialize(r.bytes());
  const std::uint64_t n = r.u64();
  if (n > p.capacity_) throw ParseError("sidelined set exceeds its capacity");
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t key = r.u64();
    const double y = r.f64();
    if (!(y > 0.0) || !std::isfinite(y) || p.by_key_.contains(key)) throw ParseError("invalid sidelined entry");
    p.by_key_.emplace(key, y);
    p.by_y_.emplace(y, key);
  }
  check_done(r);
  if (p.md_.k() != cfg.k || p.md_.seed() != cfg.seed) throw ParseError("pipeline sketch disagrees with its header");
  return p;
}

// ---------------------------------------------------------------- FullRangePipeline

FullRangePipeline::FullRangePipeline(PipelineConfig cfg)
    : cfg_(cfg), mapper_(mapper_config(cfg, 0.0)), at_(cfg.k, cfg.seed) {
  check_config(cfg_);
}

void FullRangePipeline::ingest(const Element& e, Ordinal ord) {
  mapper_.full_range(e, ord, [this](const OutputElement& o) {
    ++outputs_;
    at_.update(o);
  });
  sum_.update(e.value);
}

void FullRangePipeline::ingest_output(const OutputElement& o) { at_.update(o); }

void FullRangePipeline::merge(const FullRangePipeline& other) {
  check_mergeable(cfg_, other.cfg_);
  at_.merge(other.at_);
  sum_.merge(other.sum_);
  outputs_ += other.outputs_;
}

double FullRangePipeline::estimate_point(double t) const {
  if (!(t > 0.0)) throw InvalidArgument("point threshold t must be > 0");
  const double est = at_.estimate(t);
  if (est < fallback_level(cfg_.epsilon)) return t * sum_.value();
  return est / cfg_.r;
}

double FullRangePipeline::estimate_combination(const CoefficientFunction& a) const {
  const auto& steps = at_.profile();
  if (steps.empty() || a.empty()) return 0.0;
  const double level = fallback_level(cfg_.epsilon);
  std::size_t first = 0;
  while (first < steps.size() && steps[first].estimate < level) ++first;
  double total = 0.0;
  if (first == steps.size()) {
    // Never saturates: no fallback region.
    first = 0;
  } else {
    total += sum_.value() * head_exclusive(a, steps[first].y);
  }
  double upper_tail = 0.0;  // tail(a, next breakpoint)
  double contribution = 0.0;
  for (std::size_t j = steps.size(); j-- > first;) {
    const double lower_tail = a.tail_integral(steps[j].y);
    contribution += steps[j].estimate * (lower_tail - upper_tail);
    upper_tail = lower_tail;
  }
  return total + contribution / cfg_.r;
}

std::pair<double, double> FullRangePipeline::estimate_signed_parts(const SignedCoefficientFunction& a) const {
  return {a.linear * sum_.value() + estimate_combination(a.plus), estimate_combination(a.minus)};
}

std::vector<std::uint8_t> FullRangePipeline::serialize() const {
  ByteWriter w;
  w.u64(outputs_);
  w.bytes(at_.serialize());
  w.bytes(sum_.serialize());
  return std::move(w).take();
}

FullRangePipeline FullRangePipeline::deserialize(PipelineConfig cfg, std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  FullRangePipeline p(cfg);
  p.outputs_ = r.u64();
  p.at_ = AllThresholdSketch::deserialize(r.bytes());
  p.sum_ = SumCounter::deserialize(r.bytes());
  check_done(r);
  if (p.at_.k() != cfg.k || p.at_.seed() != cfg.seed) throw ParseError("pipeline sketch disagrees with its header");
  return p;
}

// ---------------------------------------------------------------- signed

SignedEstimate signed_estimate(double plus_result, double minus_result, const SignedCoefficientFunction& a,
                               double eps_plus, double eps_minus) {
  SignedEstimate out;
  out.rho = a.is_signed() ? a.rho_bound : 1.0;
  out.error_bound = out.rho * (eps_plus + (a.is_signed() ? eps_minus : 0.0));
  const double diff = plus_result - (a.is_signed() ? minus_result : 0.0);
  if (diff < 0.0) {
    out.clamped = true;
    out.value = 0.0;
  } else {
    out.value = diff;
  }
  return out;
}

}  // namespace freqsketch
