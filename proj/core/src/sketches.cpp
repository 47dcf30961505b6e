#include "freqsketch/sketches.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "freqsketch/error.hpp"
#include "freqsketch/serialization.hpp"

namespace freqsketch {
namespace {

constexpr std::string_view kMagic = "FSKS";
constexpr std::uint16_t kVersion = 1;
constexpr double kInf = std::numeric_limits<double>::infinity();

void write_header(ByteWriter& w, SketchType type, std::uint32_t k, std::uint64_t seed, std::uint64_t count) {
  w.raw(kMagic);
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(type));
  w.u32(k);
  w.u64(seed);
  w.u64(count);
}

struct Header {
  std::uint32_t k;
  std::uint64_t seed;
  std::uint64_t count;
};

Header read_header(ByteReader& r, SketchType type) {
  r.expect(kMagic);
  if (const auto v = r.u16(); v != kVersion) throw ParseError("unsupported sketch version " + std::to_string(v));
  if (r.u8() != static_cast<std::uint8_t>(type)) throw ParseError("unexpected sketch type tag");
  Header h{r.u32(), r.u64(), r.u64()};
  if (type != SketchType::sum && h.k < 2) throw ParseError("sketch k must be >= 2");
  return h;
}

void check_compatible(std::uint32_t k1, std::uint64_t s1, std::uint32_t k2, std::uint64_t s2) {
  if (k1 != k2) throw IncompatibleSketch("k");
  if (s1 != s2) throw IncompatibleSketch("seed");
}

void check_done(const ByteReader& r) {
  if (!r.done()) throw ParseError("trailing bytes after sketch");
}

double inclusion(double rate) { return -std::expm1(-rate); }

template <class E>
bool rank_less(const E& a, const E& b) {
  return std::tie(a.rank, a.outkey) < std::tie(b.rank, b.outkey);
}

}  // namespace

// ---------------------------------------------------------------- DistinctCounter

DistinctCounter::DistinctCounter(std::uint32_t k, std::uint64_t seed) : k_(k), seed_(seed) {
  // The saturated estimator (k-1)/u_k needs k >= 2.
  if (k < 2) throw InvalidArgument("sketch k must be >= 2");
  entries_.reserve(k + 1);
}

void DistinctCounter::insert(Entry e) {
  if (entries_.size() == k_ && !rank_less(e, entries_.back())) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), e, rank_less<Entry>);
  if (it != entries_.end() && *it == e) return;
  entries_.insert(it, e);
  if (entries_.size() > k_) entries_.pop_back();
}

void DistinctCounter::update(std::uint64_t outkey) { insert(Entry{outkey_rank(outkey, seed_), outkey}); }

void DistinctCounter::merge(const DistinctCounter& other) {
  check_compatible(k_, seed_, other.k_, other.seed_);
  for (const auto& e : other.entries_) insert(e);
}

DistinctCounter DistinctCounter::merged(const DistinctCounter& a, const DistinctCounter& b) {
  DistinctCounter out = a;
  out.merge(b);
  return out;
}

double DistinctCounter::estimate() const noexcept {
  if (exact()) return static_cast<double>(entries_.size());
  return (k_ - 1.0) / inclusion(entries_.back().rank);
}

std::vector<std::uint8_t> DistinctCounter::serialize() const {
  ByteWriter w;
  write_header(w, SketchType::distinct, k_, seed_, entries_.size());
  for (const auto& e : entries_) w.u64(e.outkey);
  return std::move(w).take();
}

DistinctCounter DistinctCounter::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  const Header h = read_header(r, SketchType::distinct);
  if (h.count > h.k) throw ParseError("distinct counter holds more than k entries");
  DistinctCounter dc(h.k, h.seed);
  for (std::uint64_t i = 0; i < h.count; ++i) dc.update(r.u64());
  check_done(r);
  if (dc.entries_.size() != h.count) throw ParseError("duplicate outkeys in distinct counter");
  return dc;
}

// ---------------------------------------------------------------- MaxDistinctSketch

MaxDistinctSketch::MaxDistinctSketch(std::uint32_t k, std::uint64_t seed) : k_(k), seed_(seed) {
  // The saturated estimator (k-1)/u_k needs k >= 2.
  if (k < 2) throw InvalidArgument("sketch k must be >= 2");
  entries_.reserve(k + 1);
}

void MaxDistinctSketch::update(const OutputElement& e) {
  if (!(e.value > 0.0)) return;
  if (!std::isfinite(e.value)) throw InvalidArgument("max-distinct value must be finite");
  const double base = outkey_rank(e.outkey, seed_);
  const Entry fresh{base / e.value, e.outkey, e.value};
  // A stored copy of this key has a rank no larger than its latest, so it cannot be
  // affected by an update that would land past the current k-th rank.
  if (entries_.size() == k_ && !rank_less(fresh, entries_.back())) return;
  if (auto it = values_.find(e.outkey); it != values_.end()) {
    if (it->second >= e.value) return;
    const Entry old{base / it->second, e.outkey, it->second};
    entries_.erase(std::lower_bound(entries_.begin(), entries_.end(), old, rank_less<Entry>));
    it->second = e.value;
  } else {
    values_.emplace(e.outkey, e.value);
  }
  entries_.insert(std::lower_bound(entries_.begin(), entries_.end(), fresh, rank_less<Entry>), fresh);
  if (entries_.size() > k_) {
    values_.erase(entries_.back().outkey);
    entries_.pop_back();
  }
}

void MaxDistinctSketch::merge(const MaxDistinctSketch& other) {
  check_compatible(k_, seed_, other.k_, other.seed_);
  for (const auto& e : other.entries_) update(e.outkey, e.value);
}

MaxDistinctSketch MaxDistinctSketch::merged(const MaxDistinctSketch& a, const MaxDistinctSketch& b) {
  MaxDistinctSketch out = a;
  out.merge(b);
  return out;
}

double MaxDistinctSketch::estimate() const noexcept {
  double total = 0.0;
  if (exact()) {
    for (const auto& e : entries_) total += e.value;
    return total;
  }
  const double tau = entries_.back().rank;
  for (std::size_t i = 0; i + 1 < entries_.size(); ++i) total += entries_[i].value / inclusion(entries_[i].value * tau);
  return total;
}

std::vector<std::uint8_t> MaxDistinctSketch::serialize() const {
  ByteWriter w;
  write_header(w, SketchType::max_distinct, k_, seed_, entries_.size());
  for (const auto& e : entries_) {
    w.u64(e.outkey);
    w.f64(e.value);
  }
  return std::move(w).take();
}

MaxDistinctSketch MaxDistinctSketch::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  const Header h = read_header(r, SketchType::max_distinct);
  if (h.count > h.k) throw ParseError("max-distinct sketch holds more than k entries");
  MaxDistinctSketch md(h.k, h.seed);
  for (std::uint64_t i = 0; i < h.count; ++i) {
    const std::uint64_t key = r.u64();
    const double v = r.f64();
    if (!(v > 0.0) || !std::isfinite(v)) throw ParseError("invalid max-distinct value");
    md.update(key, v);
  }
  check_done(r);
  if (md.entries_.size() != h.count) throw ParseError("duplicate outkeys in max-distinct sketch");
  return md;
}

// ---------------------------------------------------------------- AllThresholdSketch

namespace {

// Running k smallest (rank, outkey) pairs; top() is the k-th.
class KSmallest {
 public:
  explicit KSmallest(std::uint32_t k) : k_(k) {}

  [[nodiscard]] bool admits(double rank, std::uint64_t outkey) const {
    return heap_.size() < k_ || std::pair(rank, outkey) < heap_.top();
  }
  void push(double rank, std::uint64_t outkey) {
    heap_.emplace(rank, outkey);
    if (heap_.size() > k_) heap_.pop();
  }
  [[nodiscard]] bool full() const { return heap_.size() == k_; }
  [[nodiscard]] double kth() const { return heap_.top().first; }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }

 private:
  std::uint32_t k_;
  std::priority_queue<std::pair<double, std::uint64_t>> heap_;
};

}  // namespace

AllThresholdSketch::AllThresholdSketch(std::uint32_t k, std::uint64_t seed) : k_(k), seed_(seed) {
  // The saturated estimator (k-1)/u_k needs k >= 2.
  if (k < 2) throw InvalidArgument("sketch k must be >= 2");
}

void AllThresholdSketch::update(const OutputElement& e) {
  if (!(e.value >= 0.0) || !std::isfinite(e.value)) throw InvalidArgument("all-threshold value must be finite and >= 0");
  const double rank = outkey_rank(e.outkey, seed_);
  // Reject keys already dominated by k retained keys with y' <= y and a smaller rank.
  if (!profile_.empty()) {
    auto it = std::upper_bound(profile_.begin(), profile_.end(), e.value,
                               [](double y, const Step& s) { return y < s.y; });
    if (it != profile_.begin()) {
      const std::size_t idx = static_cast<std::size_t>(it - profile_.begin()) - 1;
      if (rank > kth_[idx]) return;
    }
  }
  buffer_.push_back(Entry{e.value, rank, e.outkey});
  if (buffer_.size() >= std::max<std::size_t>(entries_.size(), 8u * k_)) compact();
}

void AllThresholdSketch::compact() const {
  if (buffer_.empty()) return;
  std::vector<Entry> all;
  all.reserve(entries_.size() + buffer_.size());
  all.insert(all.end(), entries_.begin(), entries_.end());
  all.insert(all.end(), buffer_.begin(), buffer_.end());
  buffer_.clear();

  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.outkey, a.y) < std::tie(b.outkey, b.y);
  });
  all.erase(std::unique(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.outkey == b.outkey; }),
            all.end());
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.y, a.rank, a.outkey) < std::tie(b.y, b.rank, b.outkey);
  });

  entries_.clear();
  profile_.clear();
  kth_.clear();
  KSmallest best(k_);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Entry& e = all[i];
    if (best.admits(e.rank, e.outkey)) {
      best.push(e.rank, e.outkey);
      entries_.push_back(e);
    }
    const bool last_of_y = i + 1 == all.size() || all[i + 1].y != e.y;
    if (last_of_y && !entries_.empty() && entries_.back().y == e.y) {
      const double est = best.full() ? (k_ - 1.0) / inclusion(best.kth()) : static_cast<double>(best.size());
      profile_.push_back(Step{e.y, est});
      kth_.push_back(best.full() ? best.kth() : kInf);
    }
  }
}

void AllThresholdSketch::merge(const AllThresholdSketch& other) {
  check_compatible(k_, seed_, other.k_, other.seed_);
  const auto& theirs = other.entries();
  buffer_.insert(buffer_.end(), theirs.begin(), theirs.end());
  compact();
}

AllThresholdSketch AllThresholdSketch::merged(const AllThresholdSketch& a, const AllThresholdSketch& b) {
  AllThresholdSketch out = a;
  out.merge(b);
  return out;
}

const std::vector<AllThresholdSketch::Entry>& AllThresholdSketch::entries() const {
  compact();
  return entries_;
}

const std::vector<AllThresholdSketch::Step>& AllThresholdSketch::profile() const {
  compact();
  return profile_;
}

double AllThresholdSketch::estimate(double t) const {
  if (!(t >= 0.0)) throw InvalidArgument("threshold t must be >= 0");
  const auto& steps = profile();
  auto it = std::upper_bound(steps.begin(), steps.end(), t, [](double v, const Step& s) { return v < s.y; });
  return it == steps.begin() ? 0.0 : std::prev(it)->estimate;
}

std::vector<std::uint8_t> AllThresholdSketch::serialize() const {
  const auto& es = entries();
  ByteWriter w;
  write_header(w, SketchType::all_threshold, k_, seed_, es.size());
  for (const auto& e : es) {
    w.u64(e.outkey);
    w.f64(e.y);
  }
  return std::move(w).take();
}

AllThresholdSketch AllThresholdSketch::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  const Header h = read_header(r, SketchType::all_threshold);
  if (h.count > r.remaining() / 16) throw ParseError("truncated sketch data");
  AllThresholdSketch at(h.k, h.seed);
  for (std::uint64_t i = 0; i < h.count; ++i) {
    const std::uint64_t key = r.u64();
    const double y = r.f64();
    if (!(y >= 0.0) || !std::isfinite(y)) throw ParseError("invalid all-threshold value");
    at.buffer_.push_back(Entry{y, outkey_rank(key, h.seed), key});
  }
  check_done(r);
  at.compact();
  if (at.entries_.size() != h.count) throw ParseError("all-threshold sketch is not in canonical form");
  return at;
}

// ---------------------------------------------------------------- SumCounter

namespace {
constexpr uint128_t kSumMax = ~static_cast<uint128_t>(0);
}

void SumCounter::add_fixed(uint128_t v) {
  if (v > kSumMax - total_) {
    total_ = kSumMax;
    throw OverflowError("SUM counter overflow");
  }
  total_ += v;
}

void SumCounter::update(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw InvalidArgument("sum value must be finite and >= 0");
  if (value >= 0x1.0p64) {
    total_ = kSumMax;
    throw OverflowError("SUM counter overflow");
  }
  const double whole = std::floor(value);
  const auto hi = static_cast<std::uint64_t>(whole);
  const auto lo = static_cast<std::uint64_t>(std::ldexp(value - whole, 64));
  add_fixed((static_cast<uint128_t>(hi) << 64) | lo);
}

void SumCounter::merge(const SumCounter& other) { add_fixed(other.total_); }

SumCounter SumCounter::merged(const SumCounter& a, const SumCounter& b) {
  SumCounter out = a;
  out.merge(b);
  return out;
}

double SumCounter::value() const noexcept {
  return static_cast<double>(static_cast<std::uint64_t>(total_ >> 64)) +
         std::ldexp(static_cast<double>(static_cast<std::uint64_t>(total_)), -64);
}

bool SumCounter::saturated() const noexcept { return total_ == kSumMax; }

std::vector<std::uint8_t> SumCounter::serialize() const {
  ByteWriter w;
  write_header(w, SketchType::sum, 0, 0, 1);
  w.u64(static_cast<std::uint64_t>(total_ >> 64));
  w.u64(static_cast<std::uint64_t>(total_));
  return std::move(w).take();
}

SumCounter SumCounter::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  const Header h = read_header(r, SketchType::sum);
  if (h.k != 0 || h.seed != 0 || h.count != 1) throw ParseError("malformed SUM counter header");
  SumCounter s;
  const std::uint64_t hi = r.u64();
  const std::uint64_t lo = r.u64();
  s.total_ = (static_cast<uint128_t>(hi) << 64) | lo;
  check_done(r);
  return s;
}

}  // namespace freqsketch
