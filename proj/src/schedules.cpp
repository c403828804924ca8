#include "sgdlab/schedules.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sgdlab {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Schedule Schedule::constant(double c) {
  require(c > 0, "schedule: c must be positive");
  Schedule s;
  s.kind = Kind::constant;
  s.c = c;
  return s;
}

Schedule Schedule::power(double c, double p) {
  require(c > 0, "schedule: c must be positive");
  require(p > 0, "schedule: power exponent must be positive");
  Schedule s;
  s.kind = Kind::power;
  s.c = c;
  s.p = p;
  return s;
}

Schedule Schedule::log(double c) {
  require(c > 0, "schedule: c must be positive");
  Schedule s;
  s.kind = Kind::log;
  s.c = c;
  return s;
}

Schedule Schedule::delayed(double c, long m0, double q) {
  require(c > 0, "schedule: c must be positive");
  require(m0 >= 1, "schedule: delay must be >= 1");
  require(q > 0, "schedule: decay exponent must be positive");
  Schedule s;
  s.kind = Kind::delayed_decay;
  s.c = c;
  s.m0 = m0;
  s.p = q;
  return s;
}

double Schedule::step(long m) const {
  require(m >= 1, "schedule: iteration index must be >= 1");
  switch (kind) {
    case Kind::constant:
      return c;
    case Kind::power:
      return c / std::pow(static_cast<double>(m), p);
    case Kind::log:
      return c / std::log(1.0 + static_cast<double>(m));
    case Kind::delayed_decay:
      if (m <= m0) return c;
      return c / std::pow(static_cast<double>(m - m0), p);
  }
  return c;
}

SeriesClass classify(const Schedule& s) {
  SeriesClass out;
  switch (s.kind) {
    case Schedule::Kind::constant:
      out = {true, false, false};
      break;
    case Schedule::Kind::power:
    case Schedule::Kind::delayed_decay:
      // A finite constant head does not change the series class.
      out.sum_divergent = s.p <= 1.0;
      out.square_summable = s.p > 0.5;
      out.vanishing = true;
      break;
    case Schedule::Kind::log:
      // sum 1/ln(1+m) and sum 1/ln^2(1+m) both diverge.
      out = {true, false, true};
      break;
  }
  return out;
}

std::vector<std::string> validate_smallness(const Schedule& s, double hessian_bound) {
  require(hessian_bound > 0, "validate_smallness: L must be positive");
  std::vector<std::string> warnings;
  const double a1 = s.step(1);
  if (a1 >= 1.0 / hessian_bound)
    warnings.push_back("initial step " + std::to_string(a1) +
                       " >= 1/L; stochastic descent-in-expectation not guaranteed");
  if (a1 >= 2.0 / hessian_bound)
    warnings.push_back("initial step " + std::to_string(a1) +
                       " >= 2/L; deterministic descent not guaranteed");
  return warnings;
}

RateDescriptor predicted_rates(const Schedule& s) {
  RateDescriptor out;
  if (s.kind == Schedule::Kind::constant) {
    if (s.c >= 0.5) return out;  // recursion not contracting
    out.applicable = true;
    out.has_limiting_variance = true;
    const double a = s.c;
    const double contraction = (1.0 - 2.0 * a) * (1.0 - 2.0 * a);
    out.limiting_variance = 4.0 * a * a / (1.0 - contraction);
    return out;
  }
  if (s.kind != Schedule::Kind::power) return out;
  const double c = s.c;
  if (s.p == 1.0) {
    out.applicable = true;
    out.deterministic = {RateTerm::Kind::power_law, -4.0 * c, 1.0};
    if (c < 0.25)
      out.stochastic = {RateTerm::Kind::power_law, -4.0 * c, c * c};
    else
      out.stochastic = {RateTerm::Kind::power_law, -1.0, c * c};
    return out;
  }
  if (s.p > 0.5 && s.p < 1.0) {
    out.applicable = true;
    out.deterministic = {RateTerm::Kind::stretched_exp, 1.0 - s.p, 4.0 * c};
    out.stochastic = {RateTerm::Kind::power_law, -s.p, c * c};
    return out;
  }
  return out;
}

Schedule parse_schedule(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](size_t i) {
    size_t pos = 0;
    double v = std::stod(parts.at(i), &pos);
    if (pos != parts[i].size()) throw std::invalid_argument("schedule: bad number '" + parts[i] + "'");
    return v;
  };
  try {
    if (parts.size() == 2 && parts[0] == "const") return Schedule::constant(num(1));
    if (parts.size() == 3 && parts[0] == "power") return Schedule::power(num(1), num(2));
    if (parts.size() == 2 && parts[0] == "log") return Schedule::log(num(1));
    if (parts.size() == 4 && parts[0] == "delayed")
      return Schedule::delayed(num(1), static_cast<long>(num(2)), num(3));
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("schedule: cannot parse '" + text + "'");
  }
  throw std::invalid_argument("schedule: cannot parse '" + text +
                              "' (expected const:c | power:c:p | log:c | delayed:c:m0:q)");
}

std::string format_schedule(const Schedule& s) {
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  switch (s.kind) {
    case Schedule::Kind::constant:
      return "const:" + fmt(s.c);
    case Schedule::Kind::power:
      return "power:" + fmt(s.c) + ":" + fmt(s.p);
    case Schedule::Kind::log:
      return "log:" + fmt(s.c);
    case Schedule::Kind::delayed_decay:
      return "delayed:" + fmt(s.c) + ":" + std::to_string(s.m0) + ":" + fmt(s.p);
  }
  return "";
}

}  // namespace sgdlab
