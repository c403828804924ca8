#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgdlab/objectives.hpp"
#include "sgdlab/schedules.hpp"

namespace sgdlab {

// Additive box-violation cost K*sum_k ((lower_k - w_k)^+)^d + ((w_k - upper_k)^+)^d.
// Zero strictly inside the box.  By default its gradient is applied to the
// iterate unscaled by the step size.  sum_groups add simplex-style terms
// K*((sum_{k in group} w_k - limit)^+)^d, used by games whose feasible set is
// a product of probability simplices rather than a plain box.
struct PenaltySpec {
  std::vector<double> lower;
  std::vector<double> upper;
  double strength = 1.0;  // K > 0
  int exponent = 1;       // d >= 1
  bool scaled_by_alpha = false;

  struct SumGroup {
    std::vector<int> indices;
    double limit = 1.0;
  };
  std::vector<SumGroup> sum_groups;
};

double penalty_value(const PenaltySpec& pen, std::span<const double> w);
void penalty_gradient(const PenaltySpec& pen, std::span<const double> w, std::span<double> out);

struct DescentConfig {
  const ObjectiveFamily* objective = nullptr;
  std::optional<EstimatorKind> estimator;  // nullopt = exact gradient
  Schedule schedule = Schedule::constant(0.1);
  std::vector<double> initial_point;
  long n_iterations = 1;
  std::optional<PenaltySpec> penalty;
  std::uint64_t seed = 0;
  long record_every = 1;
  std::uint64_t trial_index = 0;  // stream id for ensemble members
};

struct TrajectoryPoint {
  long m = 0;
  std::vector<double> w;
  double f = 0.0;
  double grad_sq = 0.0;
  double alpha = 0.0;
};

struct TrajectoryRecord {
  std::vector<TrajectoryPoint> iterations;  // states w_m before each step
  std::vector<double> final_point;          // w_{M+1} after the last step
  std::uint64_t seed = 0;
  bool aborted = false;
  long abort_iteration = 0;  // step index where a non-finite value appeared
};

// Thrown by the step operations when a gradient or iterate goes non-finite.
class NumericOverflowError : public std::runtime_error {
 public:
  NumericOverflowError(std::string what, std::vector<double> iterate, long iteration)
      : std::runtime_error(std::move(what)), iterate(std::move(iterate)), iteration(iteration) {}
  std::vector<double> iterate;
  long iteration = 0;
};

std::vector<double> gd_step(const ObjectiveFamily& obj, std::span<const double> w, double alpha);
std::vector<double> sgd_step(const ObjectiveFamily& obj, std::span<const double> w, double alpha,
                             const EstimatorKind& kind, CounterRng& rng);
std::vector<double> penalized_step(const ObjectiveFamily& obj, std::span<const double> w,
                                   double alpha, const EstimatorKind& kind, CounterRng& rng,
                                   const PenaltySpec& pen);

// Runs the configured iteration n_iterations times.  Deterministic given
// (seed, trial_index); per-iteration randomness is keyed by (seed, trial, m).
// A non-finite iterate aborts the run with the partial trajectory flagged.
TrajectoryRecord run(const DescentConfig& config);

struct CheckpointValue {
  long m = 0;
  std::vector<double> w;
  double f = 0.0;
  double grad_sq = 0.0;
};

// Same iteration as run(), but only evaluates diagnostics at the given
// (sorted, 1-based) checkpoints.  Throws NumericOverflowError on abort.
std::vector<CheckpointValue> run_checkpoints(const DescentConfig& config,
                                             std::span<const long> checkpoints);

// Draws one time-averaged sample: recorded iterate w_j with probability
// alpha_j / sum alpha.  Requires record_every == 1.
std::vector<double> time_average_sample(const TrajectoryRecord& traj, CounterRng& rng);

}  // namespace sgdlab
