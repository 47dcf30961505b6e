#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <freqsketch/error.hpp>
#include <freqsketch/mappers.hpp>
#include <freqsketch/transforms.hpp>

using namespace freqsketch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One element per key: ten keys of weight 1, two of weight 5, one of weight 10.
std::vector<Element> fig2_elements() {
  std::vector<Element> out;
  for (int i = 0; i < 10; ++i) out.push_back({"a" + std::to_string(i), 1.0});
  out.push_back({"b0", 5.0});
  out.push_back({"b1", 5.0});
  out.push_back({"c0", 10.0});
  return out;
}

FrequencyDistribution fig2() { return aggregate(fig2_elements()); }

MapperConfig point_cfg(std::uint32_t r, double t, std::uint64_t seed = 0) {
  MapperConfig c;
  c.r = r;
  c.t = t;
  c.seed = seed;
  return c;
}

std::set<std::uint64_t> keys_of(const std::vector<OutputElement>& v) {
  std::set<std::uint64_t> s;
  for (const auto& o : v) s.insert(o.outkey);
  return s;
}

// Chi-square goodness of fit of observed counts against Binomial(n, p), pooling bins
// with expected count below 5. Returns the p-value.
double binomial_gof(const std::vector<std::uint64_t>& counts, std::uint32_t n, double p, std::uint64_t trials) {
  boost::math::binomial_distribution<double> b(n, p);
  double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  int bins = 0;
  for (std::uint32_t k = 0; k <= n; ++k) {
    pooled_obs += static_cast<double>(counts[k]);
    pooled_exp += boost::math::pdf(b, k) * static_cast<double>(trials);
    if (pooled_exp >= 5.0) {
      stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
      pooled_obs = pooled_exp = 0.0;
      ++bins;
    }
  }
  if (pooled_exp > 0.0) stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / std::max(pooled_exp, 1e-300);
  boost::math::chi_squared_distribution<double> chi(std::max(bins - 1, 1));
  return boost::math::cdf(boost::math::complement(chi, stat));
}

}  // namespace

TEST_CASE("replicas_for") {
  CHECK(replicas_for(0.1) == 501);
  CHECK(replicas_for(0.1, true) == 1);
  CHECK(replicas_for(0.5) == 9);
  CHECK_THROWS_AS((void)replicas_for(1.0), InvalidArgument);
  CHECK_THROWS_AS((void)replicas_for(0.0), InvalidArgument);
  CHECK_THROWS_AS((void)replicas_for(1.5), InvalidArgument);
}

TEST_CASE("mapper configuration is validated") {
  CHECK_THROWS_AS(ElementMapper(point_cfg(0, 1.0)), InvalidArgument);
  const ElementMapper m(point_cfg(3, 1.0));
  CHECK_THROWS_AS((void)m.map_point({"", 1.0}, {}), InvalidArgument);
  CHECK_THROWS_AS((void)m.map_point({"x", 0.0}, {}), InvalidArgument);
  CHECK_THROWS_AS((void)m.map_full_range({"x", -1.0}, {}), InvalidArgument);
  CHECK_THROWS_AS((void)m.map_point_fast({"x", std::nan("")}, {}), InvalidArgument);
}

TEST_CASE("point mapping edge thresholds") {
  const Element e{"key", 3.0};
  CHECK(ElementMapper(point_cfg(17, kInf)).map_point(e, {}).size() == 17);
  CHECK(ElementMapper(point_cfg(17, 0.0)).map_point(e, {}).empty());
  CHECK(ElementMapper(point_cfg(17, kInf)).map_point_fast(e, {}).size() == 17);
  CHECK(ElementMapper(point_cfg(17, 0.0)).map_point_fast(e, {}).empty());
  CHECK(ElementMapper(point_cfg(17, 1e9)).map_point_fast(e, {}).size() == 17);
  // Outkeys within one element are distinct.
  CHECK(keys_of(ElementMapper(point_cfg(17, kInf)).map_point(e, {})).size() == 17);
}

TEST_CASE("point mapping emits each replica with probability 1 - e^{-wt}") {
  const ElementMapper m(point_cfg(100000, 1.0, 5));
  const double frac = static_cast<double>(m.map_point({"x", 1.0}, {0, 1}).size()) / 1e5;
  CHECK(std::abs(frac - (1 - std::exp(-1.0))) < 0.005);
}

TEST_CASE("point mapping is deterministic and independent across ordinals") {
  const ElementMapper m(point_cfg(50, 0.3, 9));
  CHECK(m.map_point({"x", 1.0}, {0, 4}) == m.map_point({"x", 1.0}, {0, 4}));
  CHECK(m.map_point_fast({"x", 1.0}, {0, 4}) == m.map_point_fast({"x", 1.0}, {0, 4}));
  CHECK(m.map_point({"x", 1.0}, {0, 4}) != m.map_point({"x", 1.0}, {1, 4}));
  CHECK(m.map_point({"x", 1.0}, {0, 4}) != ElementMapper(point_cfg(50, 0.3, 10)).map_point({"x", 1.0}, {0, 4}));
}

TEST_CASE("fast point mapping matches the output-size law of the per-replica mapping") {
  const std::uint32_t r = 20;
  const std::uint64_t trials = 100000;
  const double p = 1 - std::exp(-2.0 * 0.5);
  const ElementMapper m(point_cfg(r, 0.5, 3));
  std::vector<std::uint64_t> slow(r + 1), fast(r + 1);
  std::vector<std::uint64_t> per_replica(r);
  const OutKeyHasher h;
  for (std::uint64_t i = 0; i < trials; ++i) {
    ++slow[m.map_point({"x", 2.0}, {0, i}).size()];
    const auto f = m.map_point_fast({"x", 2.0}, {0, i});
    ++fast[f.size()];
    for (const auto& o : f) {
      for (std::uint32_t j = 0; j < r; ++j) per_replica[j] += o.outkey == h.outkey("x", j);
    }
  }
  CHECK(binomial_gof(slow, r, p, trials) > 1e-3);
  CHECK(binomial_gof(fast, r, p, trials) > 1e-3);
  // Each replica index is selected with probability p.
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(trials));
  for (std::uint32_t j = 0; j < r; ++j) {
    CHECK(std::abs(static_cast<double>(per_replica[j]) / static_cast<double>(trials) - p) < 4.5 * se);
  }
}

TEST_CASE("point mapping is unbiased for Laplace^c") {
  const auto elems = fig2_elements();
  const auto d = fig2();
  const std::uint32_t r = 10;
  for (double t : {0.1, 1.0, 10.0}) {
    CAPTURE(t);
    double sum = 0.0, sum2 = 0.0;
    const int trials = 400;
    for (int s = 0; s < trials; ++s) {
      const ElementMapper m(point_cfg(r, t, 1000 + s));
      std::set<std::uint64_t> out;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const auto& o : m.map_point(elems[i], {0, i})) out.insert(o.outkey);
      }
      const double est = static_cast<double>(out.size()) / r;
      sum += est;
      sum2 += est * est;
    }
    const double mean = sum / trials;
    const double var = (sum2 - trials * mean * mean) / (trials - 1);
    CHECK(std::abs(mean - laplace_c(d, t)) <= 4 * std::sqrt(var / trials));
  }
}

TEST_CASE("point estimates obey the Chernoff bound") {
  const auto elems = fig2_elements();
  const auto d = fig2();
  const std::uint32_t r = 10;
  const double delta = 0.5;
  for (double t : {0.1, 1.0}) {
    const double lap = laplace_c(d, t);
    int far = 0;
    const int trials = 2000;
    for (int s = 0; s < trials; ++s) {
      const ElementMapper m(point_cfg(r, t, 77000 + s));
      std::set<std::uint64_t> out;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        for (const auto& o : m.map_point(elems[i], {0, i})) out.insert(o.outkey);
      }
      far += std::abs(static_cast<double>(out.size()) / r - lap) > delta * lap;
    }
    CHECK(static_cast<double>(far) / trials <= 2 * std::exp(-r * delta * delta * lap / 3));
  }
}

TEST_CASE("point outputs grow monotonically in t under shared draws") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    std::set<std::uint64_t> prev;
    for (double t : {0.01, 0.1, 0.5, 1.0, 3.0, kInf}) {
      const auto cur = keys_of(ElementMapper(point_cfg(30, t, 4)).map_point({"x", 0.7}, {0, i}));
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST_CASE("full-range mapping") {
  MapperConfig c = point_cfg(25, 1.0, 12);
  const ElementMapper m(c);
  const auto full = m.map_full_range({"x", 2.0}, {0, 3});
  CHECK(full.size() == 25);
  for (const auto& o : full) CHECK(o.value > 0.0);

  // Thresholding at t recovers the point mapping on the same draws.
  for (double t : {0.05, 0.3, 1.0, 4.0}) {
    std::vector<OutputElement> below;
    for (const auto& o : full) {
      if (o.value <= t) below.push_back({o.outkey, 0.0});
    }
    CHECK(below == ElementMapper(point_cfg(25, t, 12)).map_point({"x", 2.0}, {0, 3}));
  }
}

TEST_CASE("per-key minimum of full-range draws is Exp(w_x)") {
  // Elements 1, 2 and 3 of one key: the minimum is Exp(6).
  const int n = 10000;
  std::vector<double> mins;
  for (int trial = 0; trial < n; ++trial) {
    const ElementMapper m(point_cfg(1, 1.0, 500 + trial));
    double lo = kInf;
    for (std::uint64_t i = 0; i < 3; ++i) {
      lo = std::min(lo, m.map_full_range({"x", static_cast<double>(i + 1)}, {0, i})[0].value);
    }
    mins.push_back(lo);
  }
  std::sort(mins.begin(), mins.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = -std::expm1(-6.0 * mins[i]);
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  CHECK(d < 1.9495 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("combination mapping") {
  SUBCASE("a soft-cap delta reduces to the point mapping") {
    MapperConfig c = point_cfg(40, 1.0, 8);
    c.a = inverse_soft_cap(4.0);
    const auto comb = ElementMapper(c).map_combination({"x", 0.3}, {0, 1});
    for (const auto& o : comb) CHECK(o.value == 4.0);
    CHECK(keys_of(comb) == keys_of(ElementMapper(point_cfg(40, 0.25, 8)).map_point({"x", 0.3}, {0, 1})));
  }
  SUBCASE("tau above every draw fixes the value") {
    MapperConfig c = point_cfg(30, 1.0, 8);
    c.a = inverse_sqrt();
    c.tau = 1 / std::numbers::pi;
    // Weight 1e12 puts every draw far below tau.
    const auto comb = ElementMapper(c).map_combination({"x", 1e12}, {0, 1});
    CHECK(comb.size() == 30);
    for (const auto& o : comb) CHECK(o.value == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("values are tail integrals at the shared draws") {
    MapperConfig c = point_cfg(30, 1.0, 8);
    c.a = inverse_log1p();
    c.tau = 0.2;
    const auto comb = ElementMapper(c).map_combination({"x", 1.5}, {0, 2});
    const auto full = ElementMapper(c).map_full_range({"x", 1.5}, {0, 2});
    REQUIRE(comb.size() == full.size());
    for (std::size_t i = 0; i < comb.size(); ++i) {
      CHECK(comb[i].outkey == full[i].outkey);
      CHECK(comb[i].value == tail_integral(c.a, std::max(0.2, full[i].value)));
    }
  }
}

TEST_CASE("combination and point mappings are coupled for discrete a") {
  CoefficientFunction a;
  a.add_delta(0.2, 3.0).add_delta(1.0, 0.5).add_delta(4.0, 2.0);
  const std::uint32_t r = 16;
  MapperConfig c = point_cfg(r, 1.0, 21);
  c.a = a;
  const ElementMapper comb(c);
  // Several elements per key so the per-key maximum matters.
  std::vector<Element> elems;
  for (int k = 0; k < 40; ++k) {
    for (int j = 0; j <= k % 3; ++j) elems.push_back({"k" + std::to_string(k), 0.1 + 0.05 * k});
  }
  absl::flat_hash_map<std::uint64_t, double> best;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& o : comb.map_combination(elems[i], {0, i})) best[o.outkey] = std::max(best[o.outkey], o.value);
  }
  double lhs = 0.0;
  for (const auto& [k, v] : best) lhs += v;
  double rhs = 0.0;
  for (const auto& d : a.deltas()) {
    const ElementMapper pm(point_cfg(r, d.location, 21));
    std::set<std::uint64_t> keys;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (const auto& o : pm.map_point(elems[i], {0, i})) keys.insert(o.outkey);
    }
    rhs += d.mass * static_cast<double>(keys.size());
  }
  CHECK(lhs / r == doctest::Approx(rhs / r).epsilon(1e-12));
}
