#pragma once

#include <functional>
#include <span>
#include <vector>

#include "freqsketch/coefficients.hpp"
#include "freqsketch/core.hpp"
#include "freqsketch/statistic.hpp"

namespace freqsketch {

/// Laplace^c transform sum_w W(w) (1 - e^{-wt}). t = +inf gives the distinct count.
[[nodiscard]] double laplace_c(const FrequencyDistribution& dist, double t);

/// T (1 - e^{-w/T}).
[[nodiscard]] double soft_cap(double T, double w);
/// min(T, w).
[[nodiscard]] double hard_cap(double T, double w);

[[nodiscard]] CoefficientFunction inverse_soft_cap(double T);
[[nodiscard]] CoefficientFunction inverse_moment(double p);
[[nodiscard]] CoefficientFunction inverse_sqrt();
[[nodiscard]] CoefficientFunction inverse_log1p();
/// Nonnegative a with LapM[a](w) = f(w). Only soft caps, moments and log1p have one.
[[nodiscard]] CoefficientFunction inverse_transform(const StatisticSpec& spec);

/// Integral of a over [tau, inf).
[[nodiscard]] double tail_integral(const CoefficientFunction& a, double tau, bool allow_infinite = false);
/// Integral of t a(t) over [0, tau].
[[nodiscard]] double head_integral(const CoefficientFunction& a, double tau);

/// f(x) = A_inf x + integral a(t) min(t, x) dt for cap, identity, clipped moment, soft cap, log1p.
[[nodiscard]] CappingTransform capping_transform(const StatisticSpec& spec);

enum class Cap1Variant { soft, scaled_soft, three_point };

/// Signed approximation alpha of cap_1 with LapM[alpha] ~ min(1, w). rho_bound is
/// certified on default_probe_grid().
[[nodiscard]] SignedCoefficientFunction cap1_approximation(Cap1Variant variant,
                                                           ThreePoint params = kThreePointStable);

/// c = integral a(T) alpha_T dT with alpha_T(x) = T^2 alpha(T x), so LapM[c] ~ f when
/// LapM[alpha] ~ cap_1. alpha must be discrete. Coincident plus/minus deltas are netted.
[[nodiscard]] SignedCoefficientFunction lift_cap1_to_f(const CappingTransform& f,
                                                       const SignedCoefficientFunction& alpha);

/// n points log-spaced over [lo, hi].
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t n);
/// 200 points over [1e-4, 1e4].
[[nodiscard]] const std::vector<double>& default_probe_grid();

/// max over the grid of LapM[a+]/LapM[a] and LapM[a-]/LapM[a]. The grid must span at least
/// six decades; throws IllPosedTransform if LapM[a] <= 0 anywhere on it.
[[nodiscard]] double rho_estimate(const SignedCoefficientFunction& a, std::span<const double> grid);

/// max over the grid of |LapM[a](w) - f(w)| / f(w).
[[nodiscard]] double max_relative_error(const SignedCoefficientFunction& a,
                                        const std::function<double(double)>& f,
                                        std::span<const double> grid);

/// Coefficients used to estimate `spec`: the exact inverse transform when one exists,
/// otherwise the three-point cap_1 approximation lifted through the capping transform.
[[nodiscard]] SignedCoefficientFunction estimation_plan(const StatisticSpec& spec);

}  // namespace freqsketch
