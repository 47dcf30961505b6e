#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <freqsketch/error.hpp>
#include <freqsketch/transforms.hpp>

#include "quadrature.hpp"

using namespace freqsketch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kE = std::exp(1.0);

FrequencyDistribution fig2() {
  FrequencyDistribution d;
  d.add(1.0, 10);
  d.add(5.0, 2);
  d.add(10.0, 1);
  return d;
}

double fig2_closed(double t) { return 13.0 - 10.0 * std::exp(-t) - 2.0 * std::exp(-5.0 * t) - std::exp(-10.0 * t); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Quadrature oracles over a term's density.
double quad_tail(const ContinuousTerm& t, double tau) {
  return oracle::integrate([&](double x) { return t.density(x); }, tau, kInf, oracle::decades(tau, 1e6));
}
double quad_head(const ContinuousTerm& t, double tau) {
  return oracle::integrate([&](double x) { return x * t.density(x); }, 0.0, tau,
                           {1e-6, 1e-4, 1e-2, 1.0, 10.0, 100.0});
}
double quad_laplace(const ContinuousTerm& t, double w) {
  auto f = [&](double x) { return t.density(x) * -std::expm1(-w * x); };
  std::vector<double> breaks{1.0 / w, 1.0};
  for (double b : oracle::decades(1e-6, 1e6)) breaks.push_back(b);
  return oracle::integrate(f, 0.0, kInf, breaks);
}

std::vector<ContinuousTerm> all_terms() {
  return {ContinuousTerm::moment(0.5),
          ContinuousTerm::moment(0.3),
          ContinuousTerm::log1p(),
          ContinuousTerm::exp_density(2.0),
          ContinuousTerm::inverse_square(),
          ContinuousTerm::power_tail(0.5),
          ContinuousTerm::lifted(ContinuousTerm::exp_density(1.0), 0.6, 1.4),
          ContinuousTerm::lifted(ContinuousTerm::inverse_square(), 7.97, 0.08),
          ContinuousTerm::lifted(ContinuousTerm::power_tail(0.4), 1.0, 2.5)};
}

}  // namespace

TEST_CASE("laplace_c on the 13-key example") {
  const auto d = fig2();
  for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) CHECK(rel(laplace_c(d, t), fig2_closed(t)) < 1e-12);
  CHECK(laplace_c(d, 1.0) == doctest::Approx(9.307684294357642).epsilon(1e-13));
  CHECK(laplace_c(d, 0.0) == 0.0);
  CHECK(laplace_c(d, kInf) == 13.0);
  CHECK_THROWS_AS((void)laplace_c(d, -1.0), InvalidArgument);
}

TEST_CASE("laplace_c is nondecreasing, bounded by n, and above the SUM lower bound") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> w(0.1, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    FrequencyDistribution d;
    for (int i = 0; i < 30; ++i) d.add(std::round(w(gen) * 10) / 10, 1 + gen() % 5);
    double prev = 0.0;
    for (double t : log_grid(1e-4, 1e3, 60)) {
      const double v = laplace_c(d, t);
      CHECK(v >= prev);
      CHECK(v <= static_cast<double>(d.distinct()));
      CHECK(v >= (1.0 - 1.0 / kE) * d.sum() * std::min(1.0 / d.max(), t) * (1 - 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("laplace_c limits on the 13-key example") {
  const auto d = fig2();
  for (double eps : {0.1, 0.01}) {
    // Below sqrt(eps)/MAX every key is off by at most (wt)^2/2 <= eps/2 in absolute terms,
    // which is a relative error of at most wt/2 <= sqrt(eps)/2.
    const double small = std::sqrt(eps) / d.max();
    const double gap = std::abs(laplace_c(d, small) - small * d.sum());
    CHECK(gap <= eps / 2 * static_cast<double>(d.distinct()));
    CHECK(gap <= std::sqrt(eps) / 2 * small * d.sum());
    const double large = -std::log(eps) / d.min();
    CHECK(std::abs(laplace_c(d, large) - 13.0) <= eps * 13.0);
  }
}

TEST_CASE("soft_cap and hard_cap") {
  CHECK(soft_cap(1, 0) == 0.0);
  CHECK(soft_cap(1, 1) == doctest::Approx(1 - 1 / kE).epsilon(1e-15));
  for (double w : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    CHECK((1 - 1 / kE) * std::min(1.0, w) <= soft_cap(1, w));
    CHECK(soft_cap(1, w) <= std::min(1.0, w));
  }
  CHECK_THROWS_AS((void)soft_cap(0, 1), InvalidArgument);
  CHECK_THROWS_AS((void)soft_cap(-1, 1), InvalidArgument);
  CHECK(hard_cap(5, 3) == 3.0);
  CHECK(hard_cap(5, 30) == 5.0);
}

TEST_CASE("inverse transforms") {
  const auto sc = inverse_soft_cap(2.0);
  REQUIRE(sc.deltas().size() == 1);
  CHECK(sc.deltas()[0] == Delta{0.5, 2.0});
  CHECK(sc.is_discrete());

  const auto sq = inverse_sqrt();
  REQUIRE(sq.terms().size() == 1);
  for (double t : {0.01, 1.0, 7.0}) {
    CHECK(sq.density(t) == doctest::Approx(std::pow(t, -1.5) / (2 * std::sqrt(std::numbers::pi))).epsilon(1e-14));
  }
  CHECK_THROWS_AS((void)inverse_moment(0.0), InvalidArgument);
  CHECK_THROWS_AS((void)inverse_moment(1.0), InvalidArgument);
  CHECK_THROWS_AS((void)inverse_transform(StatisticSpec::cap(3)), UnsupportedStatistic);

  // LapM[a](w) reproduces f(w) through the quadrature oracle.
  const auto moment_half = inverse_moment(0.5);
  const auto& m = moment_half.terms()[0];
  for (double w : {0.1, 1.0, 10.0}) CHECK(rel(quad_laplace(m, w), std::sqrt(w)) < 1e-9);
  const auto log_inverse = inverse_log1p();
  const auto& l = log_inverse.terms()[0];
  for (double w : {0.1, 1.0, 10.0}) CHECK(rel(quad_laplace(l, w), std::log1p(w)) < 1e-9);
  const auto s = inverse_transform(StatisticSpec::soft_cap(3.0));
  for (double w : {0.1, 1.0, 10.0}) CHECK(rel(s.laplace_m(w), soft_cap(3.0, w)) < 1e-14);
}

TEST_CASE("tail and head integral examples") {
  CHECK(tail_integral(inverse_soft_cap(2), 0.4) == 2.0);
  CHECK(tail_integral(inverse_soft_cap(2), 0.5) == 2.0);
  CHECK(tail_integral(inverse_soft_cap(2), 0.6) == 0.0);
  CHECK(head_integral(inverse_soft_cap(2), 0.4) == 0.0);
  CHECK(head_integral(inverse_soft_cap(2), 0.5) == 1.0);
  CHECK(tail_integral(inverse_sqrt(), 1 / std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(head_integral(inverse_sqrt(), std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(head_integral(inverse_log1p(), 0.0) == 0.0);
  CHECK(head_integral(inverse_log1p(), 1.0) == doctest::Approx(1 - 1 / kE).epsilon(1e-15));
  CHECK_THROWS_AS((void)tail_integral(inverse_sqrt(), 0.0), DomainError);
  CHECK(tail_integral(inverse_sqrt(), 0.0, true) == kInf);
  CHECK_THROWS_AS((void)tail_integral(inverse_sqrt(), -1.0), InvalidArgument);
  // The log1p tail is the exponential integral E1.
  CHECK(tail_integral(inverse_log1p(), 1.0) == doctest::Approx(0.21938393439552029).epsilon(1e-14));
}

TEST_CASE("closed-form tail, head and Laplace^c match quadrature") {
  for (const auto& term : all_terms()) {
    CAPTURE(term.describe());
    for (double tau : {1e-3, 0.05, 0.7, 1.0, 3.0, 40.0}) {
      CAPTURE(tau);
      const double tail = term.tail(tau);
      const double q_tail = quad_tail(term, tau);
      CHECK(std::abs(tail - q_tail) <= 1e-8 * std::max(q_tail, 1e-300) + 1e-300);
      const double head = term.head(tau);
      const double q_head = quad_head(term, tau);
      CHECK(std::abs(head - q_head) <= 1e-8 * q_head + 1e-300);
    }
    for (double w : {1e-4, 0.03, 1.0, 20.0, 1e4}) {
      CAPTURE(w);
      CHECK(rel(term.laplace(w), quad_laplace(term, w)) < 1e-8);
    }
  }
}

TEST_CASE("small-argument heads keep relative accuracy") {
  const auto e = ContinuousTerm::exp_density(1.0);
  const double x = 1e-6;
  CHECK(rel(e.head(x), x * x / 2 - x * x * x / 3) < 1e-9);
  const auto s = ContinuousTerm::inverse_square();
  CHECK(rel(s.head(x), x * x / 2 - 2 * x * x * x / 3) < 1e-9);
}

TEST_CASE("capping transforms") {
  const auto cap = capping_transform(StatisticSpec::cap(4));
  CHECK(cap.a_inf == 0.0);
  REQUIRE(cap.coef.deltas().size() == 1);
  CHECK(cap.coef.deltas()[0] == Delta{4.0, 1.0});

  const auto id = capping_transform(StatisticSpec::identity());
  CHECK(id.a_inf == 1.0);
  CHECK(id.coef.empty());

  CHECK_THROWS_AS((void)capping_transform(StatisticSpec::moment(0.5)), UnsupportedStatistic);
  CHECK_THROWS_AS((void)capping_transform(StatisticSpec::distinct()), UnsupportedStatistic);

  const std::vector<StatisticSpec> families{StatisticSpec::cap(4), StatisticSpec::identity(),
                                            StatisticSpec::clipped_moment(0.5), StatisticSpec::clipped_moment(0.2),
                                            StatisticSpec::soft_cap(3), StatisticSpec::log1p()};
  for (const auto& spec : families) {
    CAPTURE(spec.descriptor());
    const auto ct = capping_transform(spec);
    // Reconstruction on a 30-point grid.
    for (double w : log_grid(1e-3, 1e4, 30)) CHECK(rel(ct.apply(w), spec.evaluate(w)) < 1e-6);
    // Quadrature reconstruction for the log1p example points.
    if (spec.kind == StatisticKind::log1p) {
      for (double w : {0.5, 3.0, 50.0}) {
        const double q = oracle::integrate([&](double t) { return ct.coef.density(t) * std::min(t, w); }, 0.0, kInf,
                                           {w, 1.0, 100.0});
        CHECK(rel(q, std::log1p(w)) < 1e-6);
      }
    }
    // A_inf + integral a = right derivative at 0, which is 1 for every family here.
    CHECK(ct.a_inf + ct.coef.tail_integral(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("three-point cap1 approximation") {
  const auto a = cap1_approximation(Cap1Variant::three_point, kThreePointStable);
  REQUIRE(a.plus.deltas().size() == 1);
  REQUIRE(a.minus.deltas().size() == 2);
  CHECK(a.plus.deltas()[0] == Delta{1.0, 2.5});
  const double a1 = a.minus.deltas()[0].mass, a2 = a.minus.deltas()[1].mass;
  CHECK(a1 == doctest::Approx(1.5 * 6.97 / 7.37).epsilon(1e-14));
  CHECK(a1 == doctest::Approx(1.418589).epsilon(1e-6));
  CHECK(a2 == doctest::Approx(0.081411).epsilon(1e-5));
  CHECK(a1 + a2 == doctest::Approx(1.5).epsilon(1e-15));

  for (auto tp : {kThreePointSharp, kThreePointStable}) {
    const auto s = cap1_approximation(Cap1Variant::three_point, tp);
    double mass = 0.0, first = 0.0;
    for (const auto& d : s.plus.deltas()) mass += d.mass, first += d.mass * d.location;
    for (const auto& d : s.minus.deltas()) mass -= d.mass, first -= d.mass * d.location;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CHECK(std::abs(first - 1.0) < 1e-12);
  }
  const auto g = log_grid(1e-3, 1e3, 200);
  auto cap1 = [](double w) { return std::min(1.0, w); };
  const auto sharp = cap1_approximation(Cap1Variant::three_point, kThreePointSharp);
  CHECK(max_relative_error(sharp, cap1, g) <= 0.12);
  CHECK(sharp.rho_bound < 12.4);
  CHECK(max_relative_error(a, cap1, g) <= 0.15);
  CHECK(a.rho_bound < 2.9);

  CHECK_THROWS_AS((void)cap1_approximation(Cap1Variant::three_point, {1.0, 0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS((void)cap1_approximation(Cap1Variant::three_point, {1.0, 1.5, 3.0}), InvalidArgument);
}

TEST_CASE("soft cap1 variants") {
  const auto soft = cap1_approximation(Cap1Variant::soft);
  CHECK(soft.plus.deltas() == std::vector<Delta>{{1.0, 1.0}});
  CHECK(soft.minus.empty());
  CHECK(soft.rho_bound == 1.0);
  const auto scaled = cap1_approximation(Cap1Variant::scaled_soft);
  CHECK(scaled.plus.deltas()[0].mass == doctest::Approx(2 * kE / (2 * kE - 1)).epsilon(1e-15));
  CHECK(max_relative_error(scaled, [](double w) { return std::min(1.0, w); }, log_grid(1e-3, 1e3, 200)) <
        max_relative_error(soft, [](double w) { return std::min(1.0, w); }, log_grid(1e-3, 1e3, 200)));
}

TEST_CASE("lifting cap1 approximations") {
  const auto alpha = cap1_approximation(Cap1Variant::three_point, kThreePointSharp);
  const auto c = lift_cap1_to_f(capping_transform(StatisticSpec::cap(5)), alpha);
  REQUIRE(c.plus.deltas().size() == 1);
  CHECK(c.plus.deltas()[0].location == doctest::Approx(0.2));
  CHECK(c.plus.deltas()[0].mass == doctest::Approx(5 * 11.0));
  CHECK(c.minus.deltas()[0].location == doctest::Approx(0.9 / 5));
  CHECK(c.minus.deltas()[1].location == doctest::Approx(3.75 / 5));
  // cap_T = T cap_1(w/T): relative error carries over unchanged.
  const auto g = log_grid(1e-3, 1e3, 200);
  CHECK(std::abs(max_relative_error(c, [](double w) { return std::min(5.0, w); }, log_grid(5e-3, 5e3, 200)) -
                 max_relative_error(alpha, [](double w) { return std::min(1.0, w); }, g)) < 1e-9);

  const auto soft = lift_cap1_to_f(capping_transform(StatisticSpec::soft_cap(1)), alpha);
  CHECK(max_relative_error(soft, [](double w) { return soft_cap(1, w); }, g) <= 0.115 + 1e-6);
  CHECK(soft.rho_bound <= alpha.rho_bound + 1e-9);

  for (const auto& spec : {StatisticSpec::log1p(), StatisticSpec::clipped_moment(0.5), StatisticSpec::cap(0.3)}) {
    const auto lifted = lift_cap1_to_f(capping_transform(spec), alpha);
    CHECK(lifted.rho_bound <= alpha.rho_bound + 1e-9);
    CHECK(max_relative_error(lifted, [&](double w) { return spec.evaluate(w); }, g) <= 0.115 + 1e-6);
  }

  // Lifted Laplace^c agrees with quadrature of the lifted densities.
  const auto log_lift = lift_cap1_to_f(capping_transform(StatisticSpec::log1p()), alpha);
  for (double w : {0.01, 1.0, 100.0}) {
    double q = 0.0;
    for (const auto& t : log_lift.plus.terms()) q += quad_laplace(t, w);
    for (const auto& t : log_lift.minus.terms()) q -= quad_laplace(t, w);
    CHECK(rel(log_lift.laplace_m(w), q) < 1e-7);
  }

  SignedCoefficientFunction continuous;
  continuous.plus = inverse_sqrt();
  CHECK_THROWS_AS((void)lift_cap1_to_f(capping_transform(StatisticSpec::cap(1)), continuous), UnsupportedStatistic);
}

TEST_CASE("rho_estimate") {
  SignedCoefficientFunction nonneg;
  nonneg.plus = inverse_log1p();
  CHECK(rho_estimate(nonneg, default_probe_grid()) == 1.0);
  CHECK(default_probe_grid().size() == 200);
  CHECK(default_probe_grid().front() == 1e-4);
  CHECK(default_probe_grid().back() == 1e4);

  CHECK_THROWS_AS((void)rho_estimate(nonneg, log_grid(1.0, 1e3, 10)), InvalidArgument);
  CHECK_THROWS_AS((void)rho_estimate(nonneg, std::vector<double>{}), InvalidArgument);

  SignedCoefficientFunction bad;
  bad.plus = CoefficientFunction::delta(1.0, 1.0);
  bad.minus = CoefficientFunction::delta(2.0, 2.0);
  CHECK_THROWS_AS((void)rho_estimate(bad, default_probe_grid()), IllPosedTransform);
}

TEST_CASE("estimation plans") {
  CHECK(estimation_plan(StatisticSpec::sqrt()).plus.terms().size() == 1);
  CHECK(estimation_plan(StatisticSpec::identity()).linear == 1.0);
  const auto cap = estimation_plan(StatisticSpec::cap(5));
  CHECK(cap.is_signed());
  CHECK(cap.is_discrete());
  CHECK(cap.rho_bound < 2.9);
  CHECK_THROWS_AS((void)estimation_plan(StatisticSpec::distinct()), UnsupportedStatistic);
}

TEST_CASE("statistic descriptors") {
  for (const char* d : {"capT=5", "softcapT=0.25", "moment=0.3", "sqrt", "log1p", "cmoment=0.5", "sum", "distinct",
                        "cap1approx=A:10,b1:0.9,b2:3.75"}) {
    CAPTURE(d);
    const auto spec = parse_statistic(d);
    CHECK(parse_statistic(spec.descriptor()) == spec);
  }
  CHECK(parse_statistic("capT=5").three_point == kThreePointStable);
  CHECK(parse_statistic("cap1approx=A:1.5,b1:0.6,b2:7.97").three_point == kThreePointStable);
  CHECK(parse_statistic("sqrt").evaluate(9.0) == 3.0);
  CHECK(parse_statistic("cmoment=0.5").evaluate(0.25) == 0.25);
  CHECK_THROWS_AS((void)parse_statistic("capT"), ParseError);
  CHECK_THROWS_AS((void)parse_statistic("capT=x"), ParseError);
  CHECK_THROWS_AS((void)parse_statistic("sqrt=2"), ParseError);
  CHECK_THROWS_AS((void)parse_statistic("nope"), ParseError);
  CHECK_THROWS_AS((void)parse_statistic("cap1approx=A:1"), ParseError);
  CHECK_THROWS_AS((void)parse_statistic("moment=1.5"), InvalidArgument);
  CHECK_THROWS_AS((void)parse_statistic("capT=-1"), InvalidArgument);
}
