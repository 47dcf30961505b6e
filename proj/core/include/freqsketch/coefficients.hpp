#pragma once

#include <memory>
#include <string>
#include <vector>

namespace freqsketch {

enum class TermKind {
  moment,          ///< p/Gamma(1-p) t^{-(1+p)}: inverse Laplace^c transform of w^p
  log1p,           ///< e^{-t}/t: inverse Laplace^c transform of ln(1+w)
  exp_density,     ///< e^{-t/theta}/theta: capping transform of the soft cap
  inverse_square,  ///< 1/(1+t)^2: capping transform of ln(1+w)
  power_tail,      ///< p(1-p) t^{p-2} on t > 1: continuous part of the clipped-moment capping transform
  lifted,          ///< a scaled cap_1 approximation delta integrated against a capping density
};

/// A nonnegative continuous density with closed-form tail and head integrals.
///
/// A lifted term represents, for a capping density a(T) and a delta (s, m) of a cap_1
/// approximation, the density c(x) = m s^2 a(s/x) / x^3. Its tail integral is
/// m * head_a(s/tau) and its head integral is m * s * tail_a(s/tau).
class ContinuousTerm {
 public:
  static ContinuousTerm moment(double p);
  static ContinuousTerm log1p();
  static ContinuousTerm exp_density(double theta);
  static ContinuousTerm inverse_square();
  static ContinuousTerm power_tail(double p);
  /// `base` must be exp_density, inverse_square or power_tail.
  static ContinuousTerm lifted(const ContinuousTerm& base, double location, double mass);

  [[nodiscard]] ContinuousTerm scaled(double factor) const;

  [[nodiscard]] TermKind kind() const noexcept { return kind_; }
  [[nodiscard]] double param() const noexcept { return param_; }
  [[nodiscard]] double scale() const noexcept { return scale_; }

  [[nodiscard]] double density(double t) const;
  /// Integral of the density over [tau, inf). +inf when it diverges (tau = 0 for heavy heads).
  [[nodiscard]] double tail(double tau) const;
  /// Integral of t * density over [0, tau]. tau may be +inf.
  [[nodiscard]] double head(double tau) const;
  /// Laplace^c transform: integral of density(t) (1 - e^{-wt}) dt.
  [[nodiscard]] double laplace(double w) const;
  /// Integral of density(t) min(t, w) dt.
  [[nodiscard]] double cap(double w) const;

  [[nodiscard]] std::string describe() const;

 private:
  ContinuousTerm(TermKind kind, double param) : kind_(kind), param_(param) {}

  static double lifted_laplace(TermKind base, double param, double c);

  TermKind kind_;
  double param_ = 0.0;
  double scale_ = 1.0;
  double location_ = 0.0;  // lifted only
  std::shared_ptr<const ContinuousTerm> base_;
};

struct Delta {
  double location = 0.0;
  double mass = 0.0;

  friend bool operator==(const Delta&, const Delta&) = default;
};

/// A nonnegative coefficient function a(t): Dirac deltas plus continuous terms.
class CoefficientFunction {
 public:
  CoefficientFunction() = default;

  static CoefficientFunction delta(double location, double mass);
  static CoefficientFunction continuous(ContinuousTerm term);

  /// Adds mass at `location`; masses at an existing location accumulate.
  CoefficientFunction& add_delta(double location, double mass);
  CoefficientFunction& add_term(ContinuousTerm term);

  /// Deltas sorted by location.
  [[nodiscard]] const std::vector<Delta>& deltas() const noexcept { return deltas_; }
  [[nodiscard]] const std::vector<ContinuousTerm>& terms() const noexcept { return terms_; }
  [[nodiscard]] bool empty() const noexcept { return deltas_.empty() && terms_.empty(); }
  [[nodiscard]] bool is_discrete() const noexcept { return terms_.empty(); }

  /// Integral of a over [tau, inf); deltas at exactly tau count. A divergent integral
  /// throws DomainError unless `allow_infinite`, in which case +inf is returned.
  [[nodiscard]] double tail_integral(double tau, bool allow_infinite = false) const;
  /// Integral of t a(t) over [0, tau]; deltas at exactly tau count.
  [[nodiscard]] double head_integral(double tau) const;
  /// Laplace^c transform of a at w.
  [[nodiscard]] double laplace_m(double w) const;
  /// Integral of a(t) min(t, w) dt, i.e. the capping-span reconstruction without A_inf.
  [[nodiscard]] double cap_apply(double w) const;
  /// Density of the continuous part at t.
  [[nodiscard]] double density(double t) const;

  [[nodiscard]] CoefficientFunction scaled(double factor) const;
  [[nodiscard]] std::string describe() const;

 private:
  std::vector<Delta> deltas_;
  std::vector<ContinuousTerm> terms_;
};

/// a = plus - minus, plus an optional linear coefficient (the cap_inf(w) = w component).
struct SignedCoefficientFunction {
  CoefficientFunction plus;
  CoefficientFunction minus;
  double linear = 0.0;
  double rho_bound = 1.0;

  [[nodiscard]] bool is_signed() const noexcept { return !minus.empty(); }
  [[nodiscard]] bool is_discrete() const noexcept { return plus.is_discrete() && minus.is_discrete(); }
  [[nodiscard]] double plus_laplace(double w) const { return linear * w + plus.laplace_m(w); }
  [[nodiscard]] double minus_laplace(double w) const { return minus.laplace_m(w); }
  [[nodiscard]] double laplace_m(double w) const { return plus_laplace(w) - minus_laplace(w); }
};

/// f(x) = a_inf * x + integral a(t) cap_t(x) dt.
struct CappingTransform {
  double a_inf = 0.0;
  CoefficientFunction coef;

  [[nodiscard]] double apply(double w) const { return a_inf * w + coef.cap_apply(w); }
};

}  // namespace freqsketch
