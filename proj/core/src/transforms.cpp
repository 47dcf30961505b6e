#include "freqsketch/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "freqsketch/error.hpp"

namespace freqsketch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) throw InvalidArgument(std::string(what) + " must be finite and > 0");
}

// Nets plus/minus deltas sharing a location so the discrete parts have disjoint support.
void net_deltas(SignedCoefficientFunction& s) {
  std::map<double, double> net;
  for (const auto& d : s.plus.deltas()) net[d.location] += d.mass;
  for (const auto& d : s.minus.deltas()) net[d.location] -= d.mass;
  CoefficientFunction plus, minus;
  for (const auto& [loc, m] : net) {
    if (m > 0.0) plus.add_delta(loc, m);
    if (m < 0.0) minus.add_delta(loc, -m);
  }
  for (const auto& t : s.plus.terms()) plus.add_term(t);
  for (const auto& t : s.minus.terms()) minus.add_term(t);
  s.plus = std::move(plus);
  s.minus = std::move(minus);
}

}  // namespace

double laplace_c(const FrequencyDistribution& dist, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("Laplace^c argument must be >= 0");
  if (t == kInf) return static_cast<double>(dist.distinct());
  double total = 0.0;
  for (const auto& [w, c] : dist.entries()) total += static_cast<double>(c) * -std::expm1(-w * t);
  return total;
}

double soft_cap(double T, double w) {
  require_positive(T, "soft cap T");
  if (!(w >= 0.0)) throw InvalidArgument("soft cap argument must be >= 0");
  return -T * std::expm1(-w / T);
}

double hard_cap(double T, double w) {
  if (!(T > 0.0)) throw InvalidArgument("cap T must be > 0");
  if (!(w >= 0.0)) throw InvalidArgument("cap argument must be >= 0");
  return std::min(T, w);
}

CoefficientFunction inverse_soft_cap(double T) {
  require_positive(T, "soft cap T");
  return CoefficientFunction::delta(1.0 / T, T);
}

CoefficientFunction inverse_moment(double p) { return CoefficientFunction::continuous(ContinuousTerm::moment(p)); }

CoefficientFunction inverse_sqrt() { return inverse_moment(0.5); }

CoefficientFunction inverse_log1p() { return CoefficientFunction::continuous(ContinuousTerm::log1p()); }

CoefficientFunction inverse_transform(const StatisticSpec& spec) {
  switch (spec.kind) {
    case StatisticKind::soft_cap: return inverse_soft_cap(spec.param);
    case StatisticKind::moment: return inverse_moment(spec.param);
    case StatisticKind::sqrt: return inverse_sqrt();
    case StatisticKind::log1p: return inverse_log1p();
    default:
      throw UnsupportedStatistic("'" + spec.descriptor() + "' has no nonnegative inverse Laplace^c transform");
  }
}

double tail_integral(const CoefficientFunction& a, double tau, bool allow_infinite) {
  return a.tail_integral(tau, allow_infinite);
}

double head_integral(const CoefficientFunction& a, double tau) { return a.head_integral(tau); }

CappingTransform capping_transform(const StatisticSpec& spec) {
  switch (spec.kind) {
    case StatisticKind::cap: return {0.0, CoefficientFunction::delta(spec.param, 1.0)};
    case StatisticKind::cap1_approx: return {0.0, CoefficientFunction::delta(1.0, 1.0)};
    case StatisticKind::identity: return {1.0, {}};
    case StatisticKind::clipped_moment: {
      CoefficientFunction a = CoefficientFunction::delta(1.0, 1.0 - spec.param);
      a.add_term(ContinuousTerm::power_tail(spec.param));
      return {0.0, std::move(a)};
    }
    case StatisticKind::soft_cap:
      return {0.0, CoefficientFunction::continuous(ContinuousTerm::exp_density(spec.param))};
    case StatisticKind::log1p: return {0.0, CoefficientFunction::continuous(ContinuousTerm::inverse_square())};
    default:
      throw UnsupportedStatistic("no capping transform for '" + spec.descriptor() +
                                 "' (its right derivative at 0 is unbounded)");
  }
}

SignedCoefficientFunction cap1_approximation(Cap1Variant variant, ThreePoint params) {
  SignedCoefficientFunction s;
  switch (variant) {
    case Cap1Variant::soft:
      s.plus = CoefficientFunction::delta(1.0, 1.0);
      break;
    case Cap1Variant::scaled_soft: {
      const double e = std::exp(1.0);
      s.plus = CoefficientFunction::delta(1.0, 2.0 * e / (2.0 * e - 1.0));
      break;
    }
    case Cap1Variant::three_point: {
      const auto [A, b1, b2] = params;
      if (b1 == b2) throw InvalidArgument("three-point locations must differ");
      require_positive(A, "three-point A");
      if (!(b1 > 0.0 && b1 < 1.0 && b2 > 1.0 && std::isfinite(b2))) {
        throw InvalidArgument("three-point parameters need 0 < beta1 < 1 < beta2");
      }
      s.plus = CoefficientFunction::delta(1.0, A + 1.0);
      s.minus.add_delta(b1, A * (b2 - 1.0) / (b2 - b1));
      s.minus.add_delta(b2, A * (1.0 - b1) / (b2 - b1));
      break;
    }
  }
  s.rho_bound = rho_estimate(s, default_probe_grid());
  return s;
}

SignedCoefficientFunction lift_cap1_to_f(const CappingTransform& f, const SignedCoefficientFunction& alpha) {
  if (!alpha.is_discrete() || alpha.linear != 0.0) {
    throw UnsupportedStatistic("lifting needs a discrete cap_1 approximation");
  }
  SignedCoefficientFunction c;
  c.linear = f.a_inf;
  auto lift_side = [&](const CoefficientFunction& side, CoefficientFunction& out) {
    for (const auto& ad : side.deltas()) {
      for (const auto& fd : f.coef.deltas()) {
        const double T = fd.location;
        out.add_delta(ad.location / T, fd.mass * T * ad.mass);
      }
      for (const auto& term : f.coef.terms()) out.add_term(ContinuousTerm::lifted(term, ad.location, ad.mass));
    }
  };
  lift_side(alpha.plus, c.plus);
  lift_side(alpha.minus, c.minus);
  net_deltas(c);
  c.rho_bound = c.is_signed() ? rho_estimate(c, default_probe_grid()) : 1.0;
  return c;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw InvalidArgument("log grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

const std::vector<double>& default_probe_grid() {
  static const std::vector<double> grid = log_grid(1e-4, 1e4, 200);
  return grid;
}

double rho_estimate(const SignedCoefficientFunction& a, std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgument("rho grid is empty");
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  if (!(*lo > 0.0) || *hi / *lo < 1e6 * (1.0 - 1e-12)) {
    throw InvalidArgument("rho grid must be positive and span at least six decades");
  }
  double rho = 1.0;
  for (double w : grid) {
    const double p = a.plus_laplace(w);
    const double m = a.minus_laplace(w);
    const double total = p - m;
    if (!(total > 0.0)) {
      throw IllPosedTransform("Laplace^c transform is not positive at w = " + std::to_string(w));
    }
    rho = std::max({rho, p / total, m / total});
  }
  return rho;
}

double max_relative_error(const SignedCoefficientFunction& a, const std::function<double(double)>& f,
                          std::span<const double> grid) {
  double worst = 0.0;
  for (double w : grid) {
    const double target = f(w);
    worst = std::max(worst, std::abs(a.laplace_m(w) - target) / target);
  }
  return worst;
}

SignedCoefficientFunction estimation_plan(const StatisticSpec& spec) {
  switch (spec.kind) {
    case StatisticKind::soft_cap:
    case StatisticKind::moment:
    case StatisticKind::sqrt:
    case StatisticKind::log1p: {
      SignedCoefficientFunction s;
      s.plus = inverse_transform(spec);
      return s;
    }
    case StatisticKind::identity: {
      SignedCoefficientFunction s;
      s.linear = 1.0;
      return s;
    }
    case StatisticKind::cap1_approx:
      return cap1_approximation(Cap1Variant::three_point, spec.three_point);
    case StatisticKind::cap:
    case StatisticKind::clipped_moment:
      return lift_cap1_to_f(capping_transform(spec), cap1_approximation(Cap1Variant::three_point, spec.three_point));
    case StatisticKind::distinct:
      break;
  }
  throw UnsupportedStatistic("'" + spec.descriptor() + "' cannot be estimated from these sketches");
}

}  // namespace freqsketch
