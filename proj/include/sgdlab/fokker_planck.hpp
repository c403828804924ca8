#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgdlab/objectives.hpp"
#include "sgdlab/schedules.hpp"

namespace sgdlab {

// Uniform cell-centered 1-d grid.
struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  int n_cells = 16;

  double dx() const { return (x_max - x_min) / n_cells; }
  double center(int i) const { return x_min + (i + 0.5) * dx(); }
};

Grid1D make_grid(double x_min, double x_max, int n_cells);

// Drift-diffusion problem rho_t + (drift * rho)_x = (diffusion * rho)_xx.
// For the descent analog, drift(x,t) = -rate(t) * f'(x) and
// diffusion(x,t) = rate(t)^2 / 2 * Var[gradient estimate at x].
struct DriftDiffusionProblem {
  std::function<double(double, double)> drift;      // (x, t)
  std::function<double(double, double)> diffusion;  // (x, t), >= 0
  std::function<double(double)> rate;               // alpha(t), kept for reference
};

// Continuous-time view of a schedule: alpha(t) = step(floor(t) + 1).
std::function<double(double)> rate_from_schedule(const Schedule& s);

// drift = -2 rate(t) x, diffusion = 2 rate(t)^2 (solvable quadratic example;
// rate == 1 is the Ornstein-Uhlenbeck process).
DriftDiffusionProblem build_problem_convex(std::function<double(double)> rate);

// Generic 1-d family: drift from the exact full gradient, diffusion from the
// exact estimator variance of the component structure.
DriftDiffusionProblem build_problem_from_objective(const ObjectiveFamily& obj,
                                                   const EstimatorKind& kind,
                                                   std::function<double(double)> rate);

struct DensityState {
  Grid1D grid;
  std::vector<double> values;  // density at cell centers
  double time = 0.0;
};

// Normalized Gaussian density sampled at cell centers.
DensityState make_gaussian_density(const Grid1D& grid, double mean, double sd);
// Normalized mixture: weight * gaussian(mean1, sd1) + (1-weight) * gaussian(mean2, sd2).
DensityState make_mixture_density(const Grid1D& grid, double mean1, double sd1, double mean2,
                                  double sd2, double weight);
void normalize(DensityState& state);

// One Crank-Nicolson step with sign-of-drift upwinding for convection,
// centered differences for diffusion, no-flux walls; coefficients are
// evaluated at t + dt/2.  Requires dt <= dx / max |drift|.
DensityState cn_step(const DensityState& state, const DriftDiffusionProblem& problem, double dt);

struct EvolveResult {
  DensityState final;
  std::vector<DensityState> checkpoints;
  double max_mass_drift = 0.0;  // max per-step relative mass change
  double min_density = 0.0;
  std::vector<std::string> warnings;
};

// Repeated cn_step up to time T, recording n_checkpoints evenly spaced
// slices (including the final state).
EvolveResult evolve(const DensityState& initial, const DriftDiffusionProblem& problem, double T,
                    double dt, int n_checkpoints = 0);

struct DensityMoments {
  double mass = 0.0;
  double mean = 0.0;
  double second_moment = 0.0;
};

// Trapezoidal quadrature of 1, x, x^2 against the density.
DensityMoments density_moments(const DensityState& state);

// RK4 integration of F'(t) = -4 rate(t) F + 4 rate(t)^2 up to time T.
double second_moment_ode(const std::function<double(double)>& rate, double f0, double T,
                         double dt);

}  // namespace sgdlab
