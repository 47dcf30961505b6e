#include "freqsketch/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "freqsketch/error.hpp"

namespace freqsketch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// E1(x) = integral_x^inf e^{-t}/t dt.
double expint_e1(double x) {
  if (x == 0.0) return kInf;
  if (x > 700.0) return 0.0;
  return -std::expint(-x);
}

// 1 - e^{-x}(1 + x), accurate near 0.
double one_minus_exp_poly(double x) {
  if (x < 0.1) {
    double term = x;  // x^n / n! for n = 1
    double sum = 0.0;
    for (int n = 2; n < 20; ++n) {
      term *= x / n;
      const double contrib = term * (n - 1);
      sum += (n % 2 == 0) ? contrib : -contrib;
    }
    return sum;
  }
  return -std::expm1(-x) - x * std::exp(-x);
}

// ln(1+x) - x/(1+x), accurate near 0.
double log1p_minus_ratio(double x) {
  if (x < 0.05) {
    double pw = x;
    double sum = 0.0;
    for (int n = 2; n < 24; ++n) {
      pw *= x;
      const double contrib = (n - 1) * pw / n;
      sum += (n % 2 == 0) ? contrib : -contrib;
    }
    return sum;
  }
  return std::log1p(x) - x / (1.0 + x);
}

// e^x E1(x) for x > 0, without overflow for large x.
double scaled_e1(double x) {
  if (x <= 1.0) return std::exp(x) * expint_e1(x);
  // Continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz.
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

constexpr double kEulerGamma = 0.57721566490153286061;

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) throw InvalidArgument(std::string(what) + " must be finite and > 0");
}

}  // namespace

ContinuousTerm ContinuousTerm::moment(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("moment exponent p must lie in (0, 1)");
  return {TermKind::moment, p};
}

ContinuousTerm ContinuousTerm::log1p() { return {TermKind::log1p, 0.0}; }

ContinuousTerm ContinuousTerm::exp_density(double theta) {
  require_positive(theta, "exp_density scale");
  return {TermKind::exp_density, theta};
}

ContinuousTerm ContinuousTerm::inverse_square() { return {TermKind::inverse_square, 0.0}; }

ContinuousTerm ContinuousTerm::power_tail(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("power_tail exponent p must lie in (0, 1)");
  return {TermKind::power_tail, p};
}

ContinuousTerm ContinuousTerm::lifted(const ContinuousTerm& base, double location, double mass) {
  if (base.kind_ != TermKind::exp_density && base.kind_ != TermKind::inverse_square &&
      base.kind_ != TermKind::power_tail) {
    throw InvalidArgument("only capping densities can be lifted");
  }
  require_positive(location, "lift location");
  require_positive(mass, "lift mass");
  ContinuousTerm t{TermKind::lifted, 0.0};
  t.scale_ = mass;
  t.location_ = location;
  t.base_ = std::make_shared<const ContinuousTerm>(base);
  return t;
}

ContinuousTerm ContinuousTerm::scaled(double factor) const {
  require_positive(factor, "scale factor");
  ContinuousTerm t = *this;
  t.scale_ *= factor;
  return t;
}

double ContinuousTerm::density(double t) const {
  if (!(t > 0.0)) return 0.0;
  switch (kind_) {
    case TermKind::moment:
      return scale_ * param_ / std::tgamma(1.0 - param_) * std::pow(t, -(1.0 + param_));
    case TermKind::log1p:
      return scale_ * std::exp(-t) / t;
    case TermKind::exp_density:
      return scale_ * std::exp(-t / param_) / param_;
    case TermKind::inverse_square:
      return scale_ / ((1.0 + t) * (1.0 + t));
    case TermKind::power_tail:
      return t > 1.0 ? scale_ * param_ * (1.0 - param_) * std::pow(t, param_ - 2.0) : 0.0;
    case TermKind::lifted: {
      // s^2 a(s/t) / t^3 = y^2 a(y) / t with y = s/t; ordered to avoid 0 * inf near t = 0.
      const double y = location_ / t;
      const double a = base_->density(y);
      return a == 0.0 ? 0.0 : scale_ * (y * (y * a)) / t;
    }
  }
  return 0.0;
}

double ContinuousTerm::tail(double tau) const {
  if (tau < 0.0 || std::isnan(tau)) throw InvalidArgument("tail threshold must be >= 0");
  if (tau == kInf) return 0.0;
  switch (kind_) {
    case TermKind::moment:
      if (tau == 0.0) return kInf;
      return scale_ / (std::pow(tau, param_) * std::tgamma(1.0 - param_));
    case TermKind::log1p:
      return scale_ * expint_e1(tau);
    case TermKind::exp_density:
      return scale_ * std::exp(-tau / param_);
    case TermKind::inverse_square:
      return scale_ / (1.0 + tau);
    case TermKind::power_tail:
      return scale_ * param_ * (tau <= 1.0 ? 1.0 : std::pow(tau, param_ - 1.0));
    case TermKind::lifted:
      return scale_ * base_->head(tau == 0.0 ? kInf : location_ / tau);
  }
  return 0.0;
}

double ContinuousTerm::head(double tau) const {
  if (tau < 0.0 || std::isnan(tau)) throw InvalidArgument("head threshold must be >= 0");
  if (tau == 0.0) return 0.0;
  const bool unbounded = tau == kInf;
  switch (kind_) {
    case TermKind::moment:
      if (unbounded) return kInf;
      return scale_ * param_ * std::pow(tau, 1.0 - param_) / ((1.0 - param_) * std::tgamma(1.0 - param_));
    case TermKind::log1p:
      return scale_ * -std::expm1(-tau);
    case TermKind::exp_density:
      return scale_ * param_ * (unbounded ? 1.0 : one_minus_exp_poly(tau / param_));
    case TermKind::inverse_square:
      if (unbounded) return kInf;
      return scale_ * log1p_minus_ratio(tau);
    case TermKind::power_tail:
      if (tau <= 1.0) return 0.0;
      if (unbounded) return kInf;
      return scale_ * (1.0 - param_) * (std::pow(tau, param_) - 1.0);
    case TermKind::lifted:
      return scale_ * location_ * base_->tail(unbounded ? 0.0 : location_ / tau);
  }
  return 0.0;
}

double ContinuousTerm::laplace(double w) const {
  if (w < 0.0 || std::isnan(w)) throw InvalidArgument("Laplace^c argument must be >= 0");
  if (w == 0.0) return 0.0;
  switch (kind_) {
    case TermKind::moment:
      return scale_ * std::pow(w, param_);
    case TermKind::log1p:
      return scale_ * std::log1p(w);
    case TermKind::exp_density:
      return scale_ * w * param_ / (1.0 + w * param_);
    case TermKind::inverse_square:
      return scale_ * w * scaled_e1(w);
    case TermKind::power_tail: {
      const double p = param_;
      return scale_ * p * (-std::expm1(-w) + std::pow(w, 1.0 - p) * boost::math::tgamma(p, w));
    }
    case TermKind::lifted:
      return scale_ * base_->scale_ * lifted_laplace(base_->kind_, base_->param_, w * location_);
  }
  return 0.0;
}

// integral a(T) T (1 - e^{-c/T}) dT for an unscaled capping density a.
double ContinuousTerm::lifted_laplace(TermKind base, double param, double c) {
  switch (base) {
    case TermKind::exp_density: {
      const double theta = param;
      const double z = 2.0 * std::sqrt(c / theta);
      return z > 700.0 ? theta : theta - 2.0 * c * std::cyl_bessel_k(2.0, z);
    }
    case TermKind::inverse_square:
      if (c < 1e-5) return c + 0.5 * c * c * (kEulerGamma + std::log(c) - 0.5);
      return kEulerGamma + std::log(c) + (1.0 - c) * scaled_e1(c);
    case TermKind::power_tail: {
      const double p = param;
      return (1.0 - p) * (std::pow(c, p) * boost::math::tgamma_lower(1.0 - p, c) + std::expm1(-c));
    }
    default:
      throw InvalidArgument("only capping densities can be lifted");
  }
}

double ContinuousTerm::cap(double w) const {
  if (w < 0.0 || std::isnan(w)) throw InvalidArgument("cap argument must be >= 0");
  if (w == 0.0) return 0.0;
  return head(w) + w * tail(w);
}

std::string ContinuousTerm::describe() const {
  std::ostringstream os;
  if (scale_ != 1.0) os << scale_ << "*";
  switch (kind_) {
    case TermKind::moment: os << "moment(" << param_ << ")"; break;
    case TermKind::log1p: os << "log1p"; break;
    case TermKind::exp_density: os << "exp_density(" << param_ << ")"; break;
    case TermKind::inverse_square: os << "inverse_square"; break;
    case TermKind::power_tail: os << "power_tail(" << param_ << ")"; break;
    case TermKind::lifted: os << "lift[" << base_->describe() << " @ " << location_ << "]"; break;
  }
  return os.str();
}

CoefficientFunction CoefficientFunction::delta(double location, double mass) {
  CoefficientFunction a;
  a.add_delta(location, mass);
  return a;
}

CoefficientFunction CoefficientFunction::continuous(ContinuousTerm term) {
  CoefficientFunction a;
  a.add_term(std::move(term));
  return a;
}

CoefficientFunction& CoefficientFunction::add_delta(double location, double mass) {
  require_positive(location, "delta location");
  require_positive(mass, "delta mass");
  auto it = std::lower_bound(deltas_.begin(), deltas_.end(), location,
                             [](const Delta& d, double loc) { return d.location < loc; });
  if (it != deltas_.end() && it->location == location) {
    it->mass += mass;
  } else {
    deltas_.insert(it, Delta{location, mass});
  }
  return *this;
}

CoefficientFunction& CoefficientFunction::add_term(ContinuousTerm term) {
  terms_.push_back(std::move(term));
  return *this;
}

double CoefficientFunction::tail_integral(double tau, bool allow_infinite) const {
  if (tau < 0.0 || std::isnan(tau)) throw InvalidArgument("tail threshold must be >= 0");
  double total = 0.0;
  for (const auto& d : deltas_) {
    if (d.location >= tau) total += d.mass;
  }
  for (const auto& t : terms_) total += t.tail(tau);
  if (std::isinf(total) && !allow_infinite) {
    throw DomainError("tail integral diverges at tau = " + std::to_string(tau));
  }
  return total;
}

double CoefficientFunction::head_integral(double tau) const {
  if (tau < 0.0 || std::isnan(tau)) throw InvalidArgument("head threshold must be >= 0");
  double total = 0.0;
  for (const auto& d : deltas_) {
    if (d.location <= tau) total += d.mass * d.location;
  }
  for (const auto& t : terms_) total += t.head(tau);
  return total;
}

double CoefficientFunction::laplace_m(double w) const {
  if (w < 0.0 || std::isnan(w)) throw InvalidArgument("Laplace^c argument must be >= 0");
  double total = 0.0;
  for (const auto& d : deltas_) total += d.mass * -std::expm1(-w * d.location);
  for (const auto& t : terms_) total += t.laplace(w);
  return total;
}

double CoefficientFunction::cap_apply(double w) const {
  if (w < 0.0 || std::isnan(w)) throw InvalidArgument("cap argument must be >= 0");
  double total = 0.0;
  for (const auto& d : deltas_) total += d.mass * std::min(d.location, w);
  for (const auto& t : terms_) total += t.cap(w);
  return total;
}

double CoefficientFunction::density(double t) const {
  double total = 0.0;
  for (const auto& term : terms_) total += term.density(t);
  return total;
}

CoefficientFunction CoefficientFunction::scaled(double factor) const {
  require_positive(factor, "scale factor");
  CoefficientFunction out;
  for (const auto& d : deltas_) out.add_delta(d.location, d.mass * factor);
  for (const auto& t : terms_) out.add_term(t.scaled(factor));
  return out;
}

std::string CoefficientFunction::describe() const {
  if (empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& d : deltas_) {
    os << (first ? "" : " + ") << d.mass << "*delta(" << d.location << ")";
    first = false;
  }
  for (const auto& t : terms_) {
    os << (first ? "" : " + ") << t.describe();
    first = false;
  }
  return os.str();
}

}  // namespace freqsketch
