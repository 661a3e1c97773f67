#include "hetshare/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hetshare/errors.hpp"

namespace hetshare {

namespace {

// Logistic function 1/(1+e^{-x}) evaluated without overflow for any x.
double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ln(e^z - 1) for z > 0, stable at both ends.
double log_expm1(double z) {
  if (z >= 36.0) {
    return z + std::log1p(-std::exp(-z));  // correction below 1 ulp past ~36
  }
  if (z >= 1e-8) {
    return std::log(std::expm1(z));
  }
  return std::log(z) + std::log1p(0.5 * z);  // expm1(z) = z(1 + z/2 + ...)
}

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

UtilityFunction::UtilityFunction(std::variant<Sigmoidal, Logarithmic> params)
    : params_(std::move(params)) {
  if (const auto* s = std::get_if<Sigmoidal>(&params_)) {
    if (!(s->steepness > 0.0) || !(s->midpoint > 0.0)) {
      throw ValidationError("sigmoidal utility requires steepness > 0 and midpoint > 0");
    }
    exp_neg_ab_ = std::exp(-s->steepness * s->midpoint);
  } else {
    const auto& l = std::get<Logarithmic>(params_);
    if (!(l.growth > 0.0) || !(l.full_rate > 0.0)) {
      throw ValidationError("logarithmic utility requires growth > 0 and full_rate > 0");
    }
    log1p_k_full_ = std::log1p(l.growth * l.full_rate);
  }
}

UtilityFunction UtilityFunction::sigmoidal(double steepness, double midpoint) {
  return UtilityFunction(Sigmoidal{steepness, midpoint});
}

UtilityFunction UtilityFunction::logarithmic(double growth, double full_rate) {
  return UtilityFunction(Logarithmic{growth, full_rate});
}

UtilityKind UtilityFunction::kind() const {
  return std::holds_alternative<Sigmoidal>(params_) ? UtilityKind::kSigmoidal
                                                    : UtilityKind::kLogarithmic;
}

// The textbook form is U(r) = c (sigma(a(r-b)) - d) with c = (1+e^{ab})/e^{ab}
// and d = 1/(1+e^{ab}).  Multiplying out the normalization constants gives two
// equivalent expressions that never form e^{ab}:
//   r >  b:  U(r) = -expm1(-a r) / (1 + e^{-a(r-b)})
//   r <= b:  U(r) = e^{-a b} expm1(a r) / (1 + e^{a(r-b)})
// Both are exact at the boundaries: U(0) = 0 because expm1(0) = 0, and the
// r <= b branch stays representable for a*b up to ~708.
double UtilityFunction::evaluate(double rate) const {
  require(rate >= 0.0, "evaluate: rate must be >= 0");
  if (const auto* s = std::get_if<Sigmoidal>(&params_)) {
    const double x = s->steepness * (rate - s->midpoint);
    if (x > 0.0) {
      return -std::expm1(-s->steepness * rate) / (1.0 + std::exp(-x));
    }
    const double z = s->steepness * rate;
    if (exp_neg_ab_ > 0.0 && z < 700.0) {
      return exp_neg_ab_ * std::expm1(z) / (1.0 + std::exp(x));
    }
    // e^{ab} or e^{ar} leaves the double range (a*b beyond ~709); the same
    // expression through the log domain rounds to the correct subnormal or 0.
    if (rate == 0.0) return 0.0;
    return std::exp(-s->steepness * s->midpoint + log_expm1(z) - std::log1p(std::exp(x)));
  }
  const auto& l = std::get<Logarithmic>(params_);
  return std::log1p(l.growth * rate) / log1p_k_full_;
}

double UtilityFunction::log_utility(double rate) const {
  require(rate > 0.0, "log_utility: rate must be > 0");
  if (const auto* s = std::get_if<Sigmoidal>(&params_)) {
    const double x = s->steepness * (rate - s->midpoint);
    if (x > 0.0) {
      // 1 - U = (e^{-x} + e^{-a r})/(1 + e^{-x}) without cancellation, so
      // ln U keeps full relative precision even when U rounds to 1.
      const double ex = std::exp(-x);
      return std::log1p(-(ex + std::exp(-s->steepness * rate)) / (1.0 + ex));
    }
    const double u = evaluate(rate);
    if (u >= std::numeric_limits<double>::min()) {
      return std::log(u);
    }
    // evaluate() underflowed (deep left tail); recompute in the log domain.
    return -s->steepness * s->midpoint + log_expm1(s->steepness * rate) -
           std::log1p(std::exp(x));
  }
  const auto& l = std::get<Logarithmic>(params_);
  const double u = std::log1p(l.growth * rate) / log1p_k_full_;
  if (u >= std::numeric_limits<double>::min()) {
    return std::log(u);
  }
  return std::log(std::log1p(l.growth * rate)) - std::log(log1p_k_full_);
}

// Sigmoidal:    d/dr ln U = a sigma(1-sigma) / (sigma - d), rearranged to
//               a sigma(-x) (1 + e^{-ab}) / (-expm1(-a r))  with x = a(r-b),
//               which is stable at r -> 0 (ratio ~ 1/r) and in both tails.
// Logarithmic:  d/dr ln U = k / ((1 + k r) ln(1 + k r)).
double UtilityFunction::d_log_utility(double rate) const {
  require(rate > 0.0, "d_log_utility: rate must be > 0");
  if (const auto* s = std::get_if<Sigmoidal>(&params_)) {
    const double x = s->steepness * (rate - s->midpoint);
    return s->steepness * logistic(-x) * (1.0 + exp_neg_ab_) /
           (-std::expm1(-s->steepness * rate));
  }
  const auto& l = std::get<Logarithmic>(params_);
  const double one_plus_kr = 1.0 + l.growth * rate;
  return l.growth / (one_plus_kr * std::log1p(l.growth * rate));
}

// Monotone bisection on d_log_utility, which decreases from +inf at 0+ to 0
// at +inf for both families.  Bracket [lo, hi] is expanded geometrically and
// then halved to a relative width of 1e-10.
double UtilityFunction::rate_at_price(double price) const {
  require(price > 0.0, "rate_at_price: price must be > 0");
  double lo = 1e-9;
  for (int i = 0; i < 200 && d_log_utility(lo) <= price; ++i) {
    lo *= 0.5;
  }
  const double scale = std::holds_alternative<Sigmoidal>(params_)
                           ? std::get<Sigmoidal>(params_).midpoint
                           : std::get<Logarithmic>(params_).full_rate;
  double hi = 10.0 * std::max(scale, 1.0);
  bool bracketed = false;
  for (int i = 0; i < 200; ++i) {
    if (d_log_utility(hi) <= price) {
      bracketed = true;
      break;
    }
    hi *= 2.0;
  }
  if (!bracketed) {
    return hi;  // price below the derivative everywhere we can represent
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (d_log_utility(mid) > price) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Closed-form inversions of U(r) = target.
// Logarithmic: r = expm1(target ln(1 + k full_rate)) / k.
// Sigmoidal:   solving c (sigma - d) = t gives sigma = (t + e^{-ab})/(1+e^{-ab}),
//              hence a(r - b) = ln(t + e^{-ab}) - ln(1 - t).
double UtilityFunction::min_rate_for_utility(double target) const {
  require(target > 0.0 && target < 1.0, "min_rate_for_utility: target must be in (0,1)");
  if (const auto* s = std::get_if<Sigmoidal>(&params_)) {
    const double x = std::log(target + exp_neg_ab_) - std::log1p(-target);
    return s->midpoint + x / s->steepness;
  }
  const auto& l = std::get<Logarithmic>(params_);
  return std::expm1(target * log1p_k_full_) / l.growth;
}

}  // namespace hetshare
