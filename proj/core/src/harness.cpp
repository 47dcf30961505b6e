#include "freqsketch/harness.hpp"

#include <cmath>
#include <string>

#include <absl/container/flat_hash_map.h>

#include "freqsketch/error.hpp"
#include "freqsketch/mappers.hpp"
#include "freqsketch/oracle.hpp"
#include "freqsketch/sketches.hpp"
#include "freqsketch/transforms.hpp"

namespace freqsketch {
namespace {

struct Accumulator {
  double exact = 0.0;
  double est = 0.0;
  double sq_measurement = 0.0;
  double sq_approx = 0.0;
};

}  // namespace

std::vector<BenchRow> run_point_bench(const BenchConfig& cfg) {
  if (cfg.reps == 0 || cfg.n_elements == 0 || cfg.k < 2) throw InvalidArgument("bench needs reps, n >= 1 and k >= 2");
  for (double T : cfg.Ts) {
    if (!(T > 0.0)) throw InvalidArgument("bench T values must be > 0");
  }
  for (auto r : cfg.rs) {
    if (r == 0) throw InvalidArgument("bench r values must be >= 1");
  }

  std::vector<BenchRow> rows;
  for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
    const double alpha = cfg.alphas[ai];
    const ZipfSampler sampler(alpha, cfg.n_keys);
    std::vector<Accumulator> acc(cfg.Ts.size() * cfg.rs.size());

    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const std::uint64_t rep_seed = mix64(cfg.seed ^ mix64((ai + 1) * 0x9e3779b97f4a7c15ULL + rep));
      const auto elements = zipf_generate(cfg.n_elements, sampler, rep_seed);
      absl::flat_hash_map<std::string, double> weights;
      for (const auto& e : elements) weights[e.key] += e.value;
      std::vector<Element> keys;
      keys.reserve(weights.size());
      for (auto& [key, w] : weights) keys.push_back(Element{key, w});
      std::sort(keys.begin(), keys.end(), [](const Element& a, const Element& b) { return a.key < b.key; });

      for (std::size_t ti = 0; ti < cfg.Ts.size(); ++ti) {
        const double T = cfg.Ts[ti];
        double exact = 0.0;
        for (const auto& e : keys) exact += soft_cap(T, e.value);
        for (std::size_t ri = 0; ri < cfg.rs.size(); ++ri) {
          MapperConfig mc;
          mc.r = cfg.rs[ri];
          mc.t = 1.0 / T;
          mc.seed = mix64(rep_seed + (ti * 131 + ri + 1) * 0xd1b54a32d192ed03ULL);
          const ElementMapper mapper(mc);
          DistinctCounter dc(cfg.k, mc.seed);
          std::uint64_t produced = 0;
          for (std::size_t i = 0; i < keys.size(); ++i) {
            mapper.point_fast(keys[i], Ordinal{0, i}, [&](const OutputElement& o) {
              ++produced;
              dc.update(o.outkey);
            });
          }
          const double measured = T * static_cast<double>(produced) / mc.r;
          const double approx = T * dc.estimate() / mc.r;
          auto& a = acc[ti * cfg.rs.size() + ri];
          a.exact += exact;
          a.est += approx;
          a.sq_measurement += std::pow(measured / exact - 1.0, 2);
          a.sq_approx += std::pow(approx / exact - 1.0, 2);
        }
      }
    }

    const double reps = static_cast<double>(cfg.reps);
    for (std::size_t ti = 0; ti < cfg.Ts.size(); ++ti) {
      for (std::size_t ri = 0; ri < cfg.rs.size(); ++ri) {
        const auto& a = acc[ti * cfg.rs.size() + ri];
        rows.push_back(BenchRow{alpha, cfg.Ts[ti], cfg.rs[ri], cfg.k, a.exact / reps, a.est / reps,
                                std::sqrt(a.sq_measurement / reps), std::sqrt(a.sq_approx / reps)});
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "alpha,T,r,k,exact_value,mean_est,NRMSE_measurement,NRMSE_approx\n";
  const auto old = out.precision(17);
  for (const auto& row : rows) {
    out << row.alpha << ',' << row.T << ',' << row.r << ',' << row.k << ',' << row.exact_value << ','
        << row.mean_est << ',' << row.nrmse_measurement << ',' << row.nrmse_approx << '\n';
  }
  out.precision(old);
}

}  // namespace freqsketch
