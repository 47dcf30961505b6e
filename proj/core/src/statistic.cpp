#include "freqsketch/statistic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "freqsketch/error.hpp"

namespace freqsketch {
namespace {

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) throw InvalidArgument(std::string(what) + " must be finite and > 0");
}

void require_exponent(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("moment exponent p must lie in (0, 1)");
}

double parse_number(std::string_view text, std::string_view descriptor) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("bad number '" + std::string(text) + "' in statistic '" + std::string(descriptor) + "'");
  }
  return v;
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

StatisticSpec StatisticSpec::cap(double T) {
  require_positive(T, "cap T");
  return {StatisticKind::cap, T, kThreePointStable};
}

StatisticSpec StatisticSpec::soft_cap(double T) {
  require_positive(T, "soft cap T");
  return {StatisticKind::soft_cap, T, kThreePointStable};
}

StatisticSpec StatisticSpec::moment(double p) {
  require_exponent(p);
  return {StatisticKind::moment, p, kThreePointStable};
}

StatisticSpec StatisticSpec::sqrt() { return {StatisticKind::sqrt, 0.5, kThreePointStable}; }

StatisticSpec StatisticSpec::log1p() { return {StatisticKind::log1p, 0.0, kThreePointStable}; }

StatisticSpec StatisticSpec::clipped_moment(double p) {
  require_exponent(p);
  return {StatisticKind::clipped_moment, p, kThreePointStable};
}

StatisticSpec StatisticSpec::identity() { return {StatisticKind::identity, 0.0, kThreePointStable}; }

StatisticSpec StatisticSpec::distinct() { return {StatisticKind::distinct, 0.0, kThreePointStable}; }

StatisticSpec StatisticSpec::cap1_approx(ThreePoint params) {
  require_positive(params.A, "three-point A");
  if (!(params.beta1 > 0.0 && params.beta1 < 1.0 && params.beta2 > 1.0 && std::isfinite(params.beta2))) {
    throw InvalidArgument("three-point parameters need 0 < beta1 < 1 < beta2");
  }
  return {StatisticKind::cap1_approx, 1.0, params};
}

double StatisticSpec::evaluate(double w) const {
  if (!(w >= 0.0)) throw InvalidArgument("statistic argument must be >= 0");
  switch (kind) {
    case StatisticKind::cap: return std::min(param, w);
    case StatisticKind::soft_cap: return -param * std::expm1(-w / param);
    case StatisticKind::moment:
    case StatisticKind::sqrt: return std::pow(w, param);
    case StatisticKind::log1p: return std::log1p(w);
    case StatisticKind::clipped_moment: return w <= 1.0 ? w : std::pow(w, param);
    case StatisticKind::identity: return w;
    case StatisticKind::distinct: return w > 0.0 ? 1.0 : 0.0;
    case StatisticKind::cap1_approx: return std::min(1.0, w);
  }
  return 0.0;
}

std::string StatisticSpec::descriptor() const {
  switch (kind) {
    case StatisticKind::cap: return "capT=" + format(param);
    case StatisticKind::soft_cap: return "softcapT=" + format(param);
    case StatisticKind::moment: return "moment=" + format(param);
    case StatisticKind::sqrt: return "sqrt";
    case StatisticKind::log1p: return "log1p";
    case StatisticKind::clipped_moment: return "cmoment=" + format(param);
    case StatisticKind::identity: return "sum";
    case StatisticKind::distinct: return "distinct";
    case StatisticKind::cap1_approx:
      return "cap1approx=A:" + format(three_point.A) + ",b1:" + format(three_point.beta1) +
             ",b2:" + format(three_point.beta2);
  }
  return {};
}

StatisticSpec parse_statistic(std::string_view descriptor) {
  const auto eq = descriptor.find('=');
  const std::string_view name = descriptor.substr(0, eq);
  const std::string_view arg = eq == std::string_view::npos ? std::string_view{} : descriptor.substr(eq + 1);
  const bool has_arg = eq != std::string_view::npos;

  auto no_arg = [&](StatisticSpec s) {
    if (has_arg) throw ParseError("statistic '" + std::string(name) + "' takes no parameter");
    return s;
  };
  auto need_arg = [&]() {
    if (!has_arg) throw ParseError("statistic '" + std::string(name) + "' needs a parameter");
    return parse_number(arg, descriptor);
  };

  if (name == "capT") return StatisticSpec::cap(need_arg());
  if (name == "softcapT") return StatisticSpec::soft_cap(need_arg());
  if (name == "moment") return StatisticSpec::moment(need_arg());
  if (name == "cmoment") return StatisticSpec::clipped_moment(need_arg());
  if (name == "sqrt") return no_arg(StatisticSpec::sqrt());
  if (name == "log1p") return no_arg(StatisticSpec::log1p());
  if (name == "sum") return no_arg(StatisticSpec::identity());
  if (name == "distinct") return no_arg(StatisticSpec::distinct());
  if (name == "cap1approx") {
    if (!has_arg) throw ParseError("cap1approx needs A:..,b1:..,b2:..");
    ThreePoint tp;
    bool seen[3] = {false, false, false};
    std::string_view rest = arg;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) throw ParseError("cap1approx item '" + std::string(item) + "' lacks ':'");
      const std::string_view key = item.substr(0, colon);
      const double v = parse_number(item.substr(colon + 1), descriptor);
      if (key == "A") {
        tp.A = v, seen[0] = true;
      } else if (key == "b1") {
        tp.beta1 = v, seen[1] = true;
      } else if (key == "b2") {
        tp.beta2 = v, seen[2] = true;
      } else {
        throw ParseError("unknown cap1approx parameter '" + std::string(key) + "'");
      }
    }
    if (!(seen[0] && seen[1] && seen[2])) throw ParseError("cap1approx needs A, b1 and b2");
    return StatisticSpec::cap1_approx(tp);
  }
  throw ParseError("unknown statistic '" + std::string(descriptor) + "'");
}

}  // namespace freqsketch
