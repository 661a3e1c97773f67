#pragma once

#include <variant>

namespace hetshare {

// Normalized S-curve utility for real-time / inelastic traffic.
// U(0) = 0, U strictly increasing, U(r) -> 1 as r -> infinity, with the
// steepest growth at `midpoint`.
struct Sigmoidal {
  double steepness;  // 1/rate units
  double midpoint;   // rate units (inflection point)
  bool operator==(const Sigmoidal&) const = default;
};

// Normalized concave utility for delay-tolerant / elastic traffic.
// U(0) = 0, U strictly increasing, U(full_rate) = 1 (not clamped beyond).
struct Logarithmic {
  double growth;     // 1/rate units
  double full_rate;  // rate units (100% utilization)
  bool operator==(const Logarithmic&) const = default;
};

enum class UtilityKind { kSigmoidal, kLogarithmic };

// One user's application utility.  Immutable after construction; every
// member function is a pure function of (parameters, argument) and safe to
// call concurrently.
class UtilityFunction {
 public:
  static UtilityFunction sigmoidal(double steepness, double midpoint);
  static UtilityFunction logarithmic(double growth, double full_rate);

  UtilityKind kind() const;
  const std::variant<Sigmoidal, Logarithmic>& params() const { return params_; }

  // U(r) in [0, 1].  Requires r >= 0.  Logarithmic utilities evaluate
  // above 1 for r > full_rate; callers that care must stay below it.
  double evaluate(double rate) const;

  // ln U(r), finite for every r > 0.
  double log_utility(double rate) const;

  // d/dr ln U(r); strictly positive and strictly decreasing on (0, inf).
  double d_log_utility(double rate) const;

  // Inverse of d_log_utility: the unique r > 0 with d_log_utility(r) = price.
  double rate_at_price(double price) const;

  // Inverse of evaluate: the unique r > 0 with U(r) = target, target in (0,1).
  double min_rate_for_utility(double target) const;

 private:
  explicit UtilityFunction(std::variant<Sigmoidal, Logarithmic> params);

  std::variant<Sigmoidal, Logarithmic> params_;
  // Cached constants.  Sigmoidal: exp(-a*b) (never overflows, unlike e^{ab});
  // Logarithmic: log1p(k*full_rate).
  double exp_neg_ab_ = 0.0;
  double log1p_k_full_ = 0.0;
};

}  // namespace hetshare
