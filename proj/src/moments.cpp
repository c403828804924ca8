#include "sgdlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgdlab {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

MomentSeries exact_moments(const Schedule& s, double e1, double f1, long M) {
  require(M >= 1, "exact_moments: M must be >= 1");
  require(f1 >= e1 * e1, "exact_moments: F1 must be >= E1^2");
  MomentSeries out;
  out.schedule = s;
  out.initial_expectation = e1;
  out.initial_second_moment = f1;
  out.expectations.reserve(M);
  out.second_moments.reserve(M);
  out.variances.reserve(M);
  double e = e1, f = f1, v = f1 - e1 * e1;
  for (long m = 1; m <= M; ++m) {
    out.expectations.push_back(e);
    out.second_moments.push_back(f);
    out.variances.push_back(v);
    if (m == M) break;
    const double a = s.step(m);
    const double r = 1.0 - 2.0 * a;
    e = r * e;
    f = r * r * f + 4.0 * a * a;
    v = r * r * v + 4.0 * a * a;
  }
  return out;
}

MomentSeries closed_form_moments(const Schedule& s, double e1, double v1, long M) {
  require(M >= 1, "closed_form_moments: M must be >= 1");
  require(v1 >= 0, "closed_form_moments: V1 must be nonnegative");
  MomentSeries out;
  out.schedule = s;
  out.initial_expectation = e1;
  out.initial_second_moment = v1 + e1 * e1;

  std::vector<double> alpha(M), factor(M);
  bool all_positive = true;
  for (long m = 1; m < M; ++m) {
    alpha[m] = s.step(m);
    factor[m] = 1.0 - 2.0 * alpha[m];
    if (factor[m] <= 0) all_positive = false;
  }

  out.expectations.resize(M);
  out.second_moments.resize(M);
  out.variances.resize(M);
  out.expectations[0] = e1;
  out.variances[0] = v1;
  out.second_moments[0] = v1 + e1 * e1;

  if (all_positive) {
    // prefix log-sums with compensated accumulation
    double lsum = 0.0, comp = 0.0;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    double log_v1 = v1 > 0 ? std::log(v1) : neg_inf;
    double log_noise = neg_inf;  // log sum_j exp(log(4a_j^2) - 2 L_j)
    for (long m = 2; m <= M; ++m) {
      const long j = m - 1;  // new factor and noise term index
      const double y = std::log(factor[j]) - comp;
      const double u = lsum + y;
      comp = (u - lsum) - y;
      lsum = u;
      const double aj = alpha[j];
      if (aj > 0) {
        const double term = std::log(4.0 * aj * aj) - 2.0 * lsum;
        log_noise = log_add_exp(log_noise, term);
      }
      const double e = e1 * std::exp(lsum);
      double v = 0.0;
      if (log_v1 != neg_inf) v += std::exp(2.0 * lsum + log_v1);
      if (log_noise != neg_inf) v += std::exp(2.0 * lsum + log_noise);
      out.expectations[m - 1] = e;
      out.variances[m - 1] = v;
      out.second_moments[m - 1] = v + e * e;
    }
    return out;
  }

  // Some factor is <= 0: evaluate the formulas literally (O(M^2) in the
  // noise sum).
  for (long m = 2; m <= M; ++m) {
    double prod = 1.0;
    for (long i = 1; i < m; ++i) prod *= factor[i];
    double noise = 0.0;
    for (long j = 1; j < m; ++j) {
      double tail = 1.0;
      for (long i = j + 1; i < m; ++i) tail *= factor[i] * factor[i];
      noise += 4.0 * alpha[j] * alpha[j] * tail;
    }
    const double e = e1 * prod;
    const double v = v1 * prod * prod + noise;
    out.expectations[m - 1] = e;
    out.variances[m - 1] = v;
    out.second_moments[m - 1] = v + e * e;
  }
  return out;
}

double fixed_point_variance(double alpha) {
  require(alpha > 0 && alpha < 0.5, "fixed_point_variance: alpha must lie in (0, 1/2)");
  const double r = 1.0 - 2.0 * alpha;
  return 4.0 * alpha * alpha / (1.0 - r * r);
}

double normality_statistic(std::span<const double> samples, double mean, double variance) {
  require(variance > 0, "normality_statistic: variance must be positive");
  require(samples.size() >= 100, "normality_statistic: need at least 100 samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double inv = 1.0 / std::sqrt(2.0 * variance);
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-(s[i] - mean) * inv);
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace sgdlab
