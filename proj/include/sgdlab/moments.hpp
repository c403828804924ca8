#pragma once

#include <span>
#include <vector>

#include "sgdlab/schedules.hpp"

namespace sgdlab {

// Exact mean / second moment / variance series of the solvable quadratic
// example x_{m+1} = (1-2a_m) x_m - 2 a_m theta, theta = +-1.
struct MomentSeries {
  std::vector<double> expectations;    // E_m, m = 1..M
  std::vector<double> second_moments;  // F_m
  std::vector<double> variances;       // V_m
  Schedule schedule = Schedule::constant(0.1);
  double initial_expectation = 0.0;
  double initial_second_moment = 0.0;
};

// Iterates the recursions
//   E_{m+1} = (1-2a_m) E_m
//   F_{m+1} = (1-2a_m)^2 F_m + 4 a_m^2
//   V_{m+1} = (1-2a_m)^2 V_m + 4 a_m^2
MomentSeries exact_moments(const Schedule& s, double e1, double f1, long M);

// Evaluates the product/sum solution formulas directly:
//   E_m = E_1 prod_{i<m} (1-2a_i)
//   V_m = V_1 prod_{i<m} (1-2a_i)^2 + sum_{j<m} 4 a_j^2 prod_{j<i<m} (1-2a_i)^2
// Products are accumulated in log space when every factor is positive,
// falling back to direct products otherwise.
MomentSeries closed_form_moments(const Schedule& s, double e1, double v1, long M);

// Unique attracting fixed point of V <- (1-2a)^2 V + 4a^2 for 0 < a < 1/2,
// i.e. 4a^2 / (1 - (1-2a)^2).
double fixed_point_variance(double alpha);

// Kolmogorov-Smirnov distance between the empirical CDF of the samples and
// the normal CDF with the given mean and variance.
double normality_statistic(std::span<const double> samples, double mean, double variance);

}  // namespace sgdlab
