#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

namespace freqsketch {

/// Soft-cap point-measurement experiment over Zipf data.
struct BenchConfig {
  std::vector<double> alphas{1.1, 1.5, 2.0};
  std::size_t n_elements = 100'000;
  std::vector<double> Ts{1.0, 5.0, 20.0, 100.0, 500.0};
  std::vector<std::uint32_t> rs{1, 10, 100};
  std::uint32_t k = 100;
  std::size_t reps = 200;
  std::uint64_t n_keys = 1'000'000;
  std::uint64_t seed = 1;
};

struct BenchRow {
  double alpha = 0.0;
  double T = 0.0;
  std::uint32_t r = 0;
  std::uint32_t k = 0;
  double exact_value = 0.0;        // mean over reps of softcap_T(W)
  double mean_est = 0.0;           // mean sketch-based estimate
  double nrmse_measurement = 0.0;  // T * dCount(E) / r against softcap_T(W)
  double nrmse_approx = 0.0;       // T * dc_estimate / r against softcap_T(W)
};

/// Fresh data per (alpha, rep), shared by every (T, r) cell. Elements are aggregated per
/// key before mapping: replica i of key x is emitted iff the minimum of its draws is
/// <= t, which has the law of one Exp(w_x) draw, so mapping one element of value w_x
/// with the binomial fast path gives the same output distribution.
[[nodiscard]] std::vector<BenchRow> run_point_bench(const BenchConfig& cfg);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace freqsketch
