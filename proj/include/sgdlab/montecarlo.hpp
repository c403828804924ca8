#pragma once

#include <array>
#include <vector>

#include "sgdlab/descent.hpp"

namespace sgdlab {

// Aggregate of an ensemble of descent runs.  final_points has one entry per
// trial; an empty vector marks an aborted trial.  Statistics cover the
// successful trials only.
struct EnsembleStats {
  long n_trials = 0;
  long aborted = 0;
  std::vector<std::vector<double>> final_points;
  std::vector<double> mean;      // componentwise over successful finals
  std::vector<double> variance;  // componentwise sample variance
  double mean_grad_sq = 0.0;     // mean |grad f|^2 at the final iterates
};

// Number of worker threads: `requested`, or hardware concurrency when 0,
// capped by the SGDLAB_THREADS environment variable if set.
int resolve_threads(int requested);

// Runs n_trials descent runs; trial t uses the base seed with trial_index t.
// Aggregation order is fixed by trial index, so the result is independent of
// scheduling.  Throws if every trial aborts.
EnsembleStats run_ensemble(const DescentConfig& base, long n_trials, int n_threads = 0);

struct Histogram {
  int dims = 1;
  std::vector<std::vector<double>> bin_edges;  // per dimension, size bins+1
  std::vector<long> counts;                    // row-major for 2-d
  long total = 0;
  long clamped = 0;  // out-of-range points counted in the end bins
};

// 1-d histogram; bins <= 0 selects the Freedman-Diaconis rule.
Histogram make_histogram(std::span<const double> points, int bins = 0);
Histogram make_histogram(std::span<const double> points, const std::vector<double>& edges);

// 2-d histogram over (x, y) pairs.
Histogram make_histogram_2d(std::span<const std::array<double, 2>> points, int bins_x,
                            int bins_y);
Histogram make_histogram_2d(std::span<const std::array<double, 2>> points,
                            const std::vector<double>& edges_x,
                            const std::vector<double>& edges_y);

// Two largest separated peaks with the valley between them below half the
// smaller peak.
struct BimodalityReport {
  bool bimodal = false;
  double peak1 = 0.0;  // bin centers, peak1 has the higher count
  double peak2 = 0.0;
  long count1 = 0;
  long count2 = 0;
  long valley = 0;
};

BimodalityReport detect_bimodality(const Histogram& h);

struct GradSqPoint {
  long m = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

// Ensemble mean of |grad f(w_m)|^2 at the given checkpoints.
std::vector<GradSqPoint> empirical_grad_sq_curve(const DescentConfig& base, long n_trials,
                                                 std::span<const long> checkpoints,
                                                 int n_threads = 0);

}  // namespace sgdlab
