#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sgdlab/rng.hpp"

namespace sgdlab {

// Sum-structured objective f(w) = (1/N) sum_i f_i(w) with per-component
// values and gradients.  Immutable after construction; safe to share across
// parallel workers.
struct ObjectiveFamily {
  int dim = 0;
  int n_components = 0;
  std::function<double(int, std::span<const double>)> component_value;
  std::function<void(int, std::span<const double>, std::span<double>)> component_gradient;
  std::string label;

  double value(std::span<const double> w) const;
};

// Gradient estimator variants.  All are unbiased for the full gradient:
//   minibatch: mean of b component gradients, sampled without replacement
//   coordinate: one random partial derivative of the full gradient, times d
//   combined: one component, then one of its coordinates, times d
struct EstimatorKind {
  enum class Kind { minibatch, coordinate, combined };
  Kind kind = Kind::minibatch;
  int batch_size = 1;

  static EstimatorKind minibatch(int b);
  static EstimatorKind coordinate();
  static EstimatorKind combined();
};

struct BoundEstimate {
  double hessian_bound = 0.0;       // max sampled spectral norm of the Hessian
  double estimator_variance = 0.0;  // max sampled E[|est|^2] - |grad|^2, clamped at 0
  double region_radius = 0.0;
};

std::vector<double> full_gradient(const ObjectiveFamily& obj, std::span<const double> w);
void full_gradient(const ObjectiveFamily& obj, std::span<const double> w, std::span<double> out);

std::vector<double> estimate_gradient(const ObjectiveFamily& obj, std::span<const double> w,
                                      const EstimatorKind& kind, CounterRng& rng);
void estimate_gradient(const ObjectiveFamily& obj, std::span<const double> w,
                       const EstimatorKind& kind, CounterRng& rng, std::span<double> out);

// Exact estimator variance Var[est](w) = E[|est|^2] - |grad|^2, computed from
// the component structure (no sampling).
double estimator_variance_exact(const ObjectiveFamily& obj, std::span<const double> w,
                                const EstimatorKind& kind);

// f(x) = x^2 + 1 with f_1 = (x-1)^2, f_2 = (x+1)^2.
ObjectiveFamily make_convex_1d();

// f(x) = x^4 + 3x^3 - 4x + 2 with f_{1,2} = f -/+ sigma*x.
ObjectiveFamily make_nonconvex_1d(double sigma);

struct LinearOffset {
  std::vector<double> c;
  double d = 0.0;
};

// Quadratic f with Hessian `quadratic` (row-major, symmetric PSD) and
// components f_i = f - c_i.x - d_i, with sum c_i = 0 and sum d_i = 0.
ObjectiveFamily make_quadratic_linear_noise(int dim, const std::vector<double>& quadratic,
                                            const std::vector<LinearOffset>& offsets);

// Samples points uniformly in the ball |w| <= radius, takes the max
// finite-difference Hessian spectral norm and the max empirical estimator
// variance over those points.
BoundEstimate estimate_bounds(const ObjectiveFamily& obj, double radius, int n_points,
                              CounterRng& rng,
                              const EstimatorKind& kind = EstimatorKind::minibatch(1),
                              int draws_per_point = 2000);

}  // namespace sgdlab
