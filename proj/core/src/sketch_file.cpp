#include "freqsketch/sketch_file.hpp"

#include <fstream>
#include <iterator>

#include "freqsketch/error.hpp"
#include "freqsketch/serialization.hpp"
#include "freqsketch/transforms.hpp"

namespace freqsketch {
namespace {

constexpr std::string_view kMagic = "FSK1";
constexpr std::uint16_t kVersion = 1;

}  // namespace

BuildMode parse_build_mode(std::string_view name) {
  if (name == "point") return BuildMode::point;
  if (name == "combination") return BuildMode::combination;
  if (name == "fullrange") return BuildMode::fullrange;
  throw ParseError("unknown mode '" + std::string(name) + "' (expected point, combination or fullrange)");
}

std::string to_string(BuildMode mode) {
  switch (mode) {
    case BuildMode::point: return "point";
    case BuildMode::combination: return "combination";
    case BuildMode::fullrange: return "fullrange";
  }
  return "unknown";
}

SketchFile::SketchFile(BuildMode mode, const StatisticSpec& statistic, PipelineConfig config)
    : header_{mode, statistic.descriptor(), config, 0}, spec_(statistic), plan_(estimation_plan(statistic)) {
  switch (mode) {
    case BuildMode::point:
      if (!plan_.is_discrete()) {
        throw UnsupportedStatistic("'" + header_.statistic + "' needs combination or fullrange mode");
      }
      for (const auto* side : {&plan_.plus, &plan_.minus}) {
        for (const auto& d : side->deltas()) points_.emplace_back(config, d.location);
      }
      break;
    case BuildMode::combination:
      combos_.emplace_back(config, plan_.plus);
      if (plan_.is_signed()) combos_.emplace_back(config, plan_.minus);
      break;
    case BuildMode::fullrange:
      full_.emplace(config);
      break;
  }
}

void SketchFile::ingest(const Element& e, Ordinal ord) {
  validate(e);
  for (auto& p : points_) p.ingest(e, ord);
  for (auto& c : combos_) c.ingest(e, ord);
  if (full_) full_->ingest(e, ord);
  sum_.update(e.value);
  ++header_.elements;
}

void SketchFile::merge(const SketchFile& other) {
  const auto& a = header_;
  const auto& b = other.header_;
  if (a.mode != b.mode) throw IncompatibleSketch("mode");
  if (a.statistic != b.statistic) throw IncompatibleSketch("statistic");
  if (a.config.epsilon != b.config.epsilon) throw IncompatibleSketch("epsilon");
  if (a.config.r != b.config.r) throw IncompatibleSketch("r");
  if (a.config.k != b.config.k) throw IncompatibleSketch("k");
  if (a.config.seed != b.config.seed) throw IncompatibleSketch("seed");
  if (a.config.outkey_bits != b.config.outkey_bits) throw IncompatibleSketch("outkey_bits");
  for (std::size_t i = 0; i < points_.size(); ++i) points_[i].merge(other.points_[i]);
  for (std::size_t i = 0; i < combos_.size(); ++i) combos_[i].merge(other.combos_[i]);
  if (full_) full_->merge(*other.full_);
  sum_.merge(other.sum_);
  header_.elements += other.header_.elements;
}

SketchFile::Estimate SketchFile::combine(double plus, double minus, const SignedCoefficientFunction& plan) const {
  Estimate out;
  out.plus = plus;
  out.minus = minus;
  out.is_signed = plan.is_signed();
  const double eps = header_.config.epsilon;
  out.certificate = signed_estimate(plus, minus, plan, eps, eps);
  out.value = out.certificate.value;
  return out;
}

SketchFile::Estimate SketchFile::estimate() const {
  double plus = plan_.linear * sum_.value();
  double minus = 0.0;
  switch (header_.mode) {
    case BuildMode::point: {
      std::size_t i = 0;
      for (const auto& d : plan_.plus.deltas()) plus += d.mass * points_[i++].estimate();
      for (const auto& d : plan_.minus.deltas()) minus += d.mass * points_[i++].estimate();
      break;
    }
    case BuildMode::combination:
      plus += combos_[0].estimate();
      if (combos_.size() > 1) minus = combos_[1].estimate();
      break;
    case BuildMode::fullrange:
      return estimate(spec_);
  }
  return combine(plus, minus, plan_);
}

SketchFile::Estimate SketchFile::estimate(const StatisticSpec& statistic) const {
  if (!full_) {
    if (statistic == spec_) return estimate();
    throw UnsupportedStatistic("statistic override needs a fullrange sketch");
  }
  const auto plan = statistic == spec_ ? plan_ : estimation_plan(statistic);
  const auto [plus, minus] = full_->estimate_signed_parts(plan);
  return combine(plus, minus, plan);
}

double SketchFile::estimate_point(double t) const {
  if (!full_) throw UnsupportedStatistic("point queries at arbitrary t need a fullrange sketch");
  return full_->estimate_point(t);
}

std::uint64_t SketchFile::outputs() const noexcept {
  std::uint64_t n = 0;
  for (const auto& p : points_) n += p.outputs();
  for (const auto& c : combos_) n += c.outputs();
  if (full_) n += full_->outputs();
  return n;
}

std::vector<std::uint8_t> SketchFile::serialize() const {
  ByteWriter w;
  w.raw(kMagic);
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(header_.mode));
  w.str(header_.statistic);
  w.f64(header_.config.epsilon);
  w.u32(header_.config.r);
  w.u32(header_.config.k);
  w.u64(header_.config.seed);
  w.u8(static_cast<std::uint8_t>(header_.config.outkey_bits));
  w.u64(header_.elements);
  w.bytes(sum_.serialize());
  for (const auto& p : points_) w.bytes(p.serialize());
  for (const auto& c : combos_) w.bytes(c.serialize());
  if (full_) w.bytes(full_->serialize());
  return std::move(w).take();
}

SketchFile SketchFile::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes.data(), bytes.size());
  r.expect(kMagic);
  if (const auto v = r.u16(); v != kVersion) throw ParseError("unsupported sketch file version " + std::to_string(v));
  const auto mode_tag = r.u8();
  if (mode_tag < 1 || mode_tag > 3) throw ParseError("unknown sketch file mode");
  const auto mode = static_cast<BuildMode>(mode_tag);
  const std::string statistic = r.str();
  PipelineConfig cfg;
  cfg.epsilon = r.f64();
  cfg.r = r.u32();
  cfg.k = r.u32();
  cfg.seed = r.u64();
  cfg.outkey_bits = r.u8();
  const std::uint64_t elements = r.u64();

  SketchFile file(mode, parse_statistic(statistic), cfg);
  file.header_.elements = elements;
  file.sum_ = SumCounter::deserialize(r.bytes());
  for (auto& p : file.points_) p = PointPipeline::deserialize(cfg, p.t(), r.bytes());
  for (auto& c : file.combos_) c = CombinationPipeline::deserialize(cfg, c.coefficients(), r.bytes());
  if (file.full_) file.full_ = FullRangePipeline::deserialize(cfg, r.bytes());
  if (!r.done()) throw ParseError("trailing bytes after sketch file");
  return file;
}

void SketchFile::save(const std::string& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

SketchFile SketchFile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace freqsketch
