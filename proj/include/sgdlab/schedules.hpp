#pragma once

#include <string>
#include <vector>

namespace sgdlab {

// Step-size rule alpha_m, m >= 1.  All variants are positive and
// nonincreasing in m.
struct Schedule {
  enum class Kind { constant, power, log, delayed_decay };

  Kind kind = Kind::constant;
  double c = 0.1;       // scale, > 0
  double p = 1.0;       // exponent for power / delayed tail
  long m0 = 0;          // delay for delayed_decay

  static Schedule constant(double c);
  static Schedule power(double c, double p);          // c / m^p
  static Schedule log(double c);                      // c / ln(1+m)
  static Schedule delayed(double c, long m0, double q);  // c, then c/(m-m0)^q

  double step(long m) const;
};

// Analytic series classification: sum alpha_m = inf, sum alpha_m^2 < inf,
// alpha_m -> 0.
struct SeriesClass {
  bool sum_divergent = false;
  bool square_summable = false;
  bool vanishing = false;
};

SeriesClass classify(const Schedule& s);

// Warnings when step(1) crosses the stochastic (1/L) or deterministic (2/L)
// smallness thresholds.
std::vector<std::string> validate_smallness(const Schedule& s, double hessian_bound);

struct RateTerm {
  enum class Kind { none, power_law, stretched_exp };
  Kind kind = Kind::none;
  double exponent = 0.0;     // power_law: m^exponent; stretched_exp: exp(-coefficient*m^exponent)
  double coefficient = 0.0;
};

// Asymptotics of E[x_m]^2-type deterministic decay and the stochastic
// variance contribution for the solvable quadratic example.
struct RateDescriptor {
  bool applicable = false;
  RateTerm deterministic;
  RateTerm stochastic;
  bool has_limiting_variance = false;
  double limiting_variance = 0.0;
};

RateDescriptor predicted_rates(const Schedule& s);

// Spec strings: "const:c", "power:c:p", "log:c", "delayed:c:m0:q".
Schedule parse_schedule(const std::string& text);
std::string format_schedule(const Schedule& s);

}  // namespace sgdlab
