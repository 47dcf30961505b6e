#pragma once

#include <string>
#include <string_view>

namespace freqsketch {

/// Parameters of a three-point cap_1 approximation (A+1) d_1 - a1 d_b1 - a2 d_b2.
struct ThreePoint {
  double A = 1.5;
  double beta1 = 0.6;
  double beta2 = 7.97;

  friend bool operator==(const ThreePoint&, const ThreePoint&) = default;
};

/// Sharper fit: relerr about 0.115, rho about 11.
inline constexpr ThreePoint kThreePointSharp{10.0, 0.9, 3.75};
/// Better conditioned fit: relerr about 0.14, rho about 2.5.
inline constexpr ThreePoint kThreePointStable{1.5, 0.6, 7.97};

enum class StatisticKind {
  cap,             ///< min(T, w)
  soft_cap,        ///< T (1 - e^{-w/T})
  moment,          ///< w^p, p in (0, 1)
  sqrt,            ///< w^{1/2}
  log1p,           ///< ln(1 + w)
  clipped_moment,  ///< min(w, w^p)
  identity,        ///< w (SUM)
  distinct,        ///< 1 for w > 0 (dCount)
  cap1_approx,     ///< min(1, w), estimated with explicit three-point parameters
};

/// A frequency statistic f together with its parameters.
struct StatisticSpec {
  StatisticKind kind = StatisticKind::identity;
  double param = 0.0;                    // T for caps, p for moments
  ThreePoint three_point = kThreePointStable;  // cap and cap1_approx only

  static StatisticSpec cap(double T);
  static StatisticSpec soft_cap(double T);
  static StatisticSpec moment(double p);
  static StatisticSpec sqrt();
  static StatisticSpec log1p();
  static StatisticSpec clipped_moment(double p);
  static StatisticSpec identity();
  static StatisticSpec distinct();
  static StatisticSpec cap1_approx(ThreePoint params);

  /// f(w) for w >= 0.
  [[nodiscard]] double evaluate(double w) const;
  /// Canonical descriptor; parse_statistic(descriptor()) == *this.
  [[nodiscard]] std::string descriptor() const;

  friend bool operator==(const StatisticSpec&, const StatisticSpec&) = default;
};

/// Parses `capT=5`, `softcapT=5`, `moment=0.5`, `sqrt`, `log1p`, `cmoment=0.5`, `sum`,
/// `distinct`, `cap1approx=A:1.5,b1:0.6,b2:7.97`. Throws ParseError on malformed input
/// and InvalidArgument on out-of-range parameters.
[[nodiscard]] StatisticSpec parse_statistic(std::string_view descriptor);

}  // namespace freqsketch
