#include "sgdlab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace sgdlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Runs fn(t) for t in [0, n) on a small worker pool.
void parallel_for(long n, int n_threads, const std::function<void(long)>& fn) {
  if (n_threads <= 1 || n <= 1) {
    for (long t = 0; t < n; ++t) fn(t);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    for (;;) {
      const long t = next.fetch_add(1);
      if (t >= n) return;
      fn(t);
    }
  };
  std::vector<std::thread> pool;
  const int k = static_cast<int>(std::min<long>(n_threads, n));
  pool.reserve(k);
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

int resolve_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  if (const char* env = std::getenv("SGDLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

EnsembleStats run_ensemble(const DescentConfig& base, long n_trials, int n_threads) {
  require(n_trials >= 1, "run_ensemble: need at least one trial");
  require(base.objective != nullptr, "run_ensemble: objective not set");
  const int dim = base.objective->dim;

  EnsembleStats stats;
  stats.n_trials = n_trials;
  stats.final_points.assign(n_trials, {});

  parallel_for(n_trials, resolve_threads(n_threads), [&](long t) {
    DescentConfig cfg = base;
    cfg.trial_index = static_cast<std::uint64_t>(t);
    cfg.record_every = std::numeric_limits<long>::max();  // finals only
    TrajectoryRecord rec = run(cfg);
    if (!rec.aborted) stats.final_points[t] = std::move(rec.final_point);
  });

  stats.mean.assign(dim, 0.0);
  stats.variance.assign(dim, 0.0);
  long ok = 0;
  for (const auto& fp : stats.final_points) {
    if (fp.empty()) {
      ++stats.aborted;
      continue;
    }
    ++ok;
    for (int k = 0; k < dim; ++k) stats.mean[k] += fp[k];
  }
  if (ok == 0) throw std::runtime_error("run_ensemble: every trial aborted");
  for (int k = 0; k < dim; ++k) stats.mean[k] /= ok;
  double grad_sq_sum = 0.0;
  std::vector<double> g(dim);
  for (const auto& fp : stats.final_points) {
    if (fp.empty()) continue;
    for (int k = 0; k < dim; ++k) {
      const double dev = fp[k] - stats.mean[k];
      stats.variance[k] += dev * dev;
    }
    full_gradient(*base.objective, fp, g);
    for (double x : g) grad_sq_sum += x * x;
  }
  const long denom = std::max<long>(1, ok - 1);
  for (int k = 0; k < dim; ++k) stats.variance[k] /= denom;
  stats.mean_grad_sq = grad_sq_sum / ok;
  return stats;
}

namespace {

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  edges.back() = hi;
  return edges;
}

int freedman_diaconis_bins(std::vector<double> sorted) {
  const size_t n = sorted.size();
  const double q1 = sorted[n / 4];
  const double q3 = sorted[(3 * n) / 4];
  const double iqr = q3 - q1;
  const double range = sorted.back() - sorted.front();
  if (iqr <= 0 || range <= 0) return 1;
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  return static_cast<int>(std::clamp(std::ceil(range / width), 1.0, 4096.0));
}

// Bin index with clamping; returns true if the point was out of range.
bool locate(const std::vector<double>& edges, double x, int* bin) {
  const int nb = static_cast<int>(edges.size()) - 1;
  if (x < edges.front()) {
    *bin = 0;
    return true;
  }
  if (x >= edges.back()) {
    *bin = nb - 1;
    return x > edges.back();
  }
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  *bin = static_cast<int>(it - edges.begin()) - 1;
  return false;
}

}  // namespace

Histogram make_histogram(std::span<const double> points, const std::vector<double>& edges) {
  require(!points.empty(), "make_histogram: need at least one point");
  require(edges.size() >= 2, "make_histogram: need at least one bin");
  require(std::is_sorted(edges.begin(), edges.end()) &&
              std::adjacent_find(edges.begin(), edges.end()) == edges.end(),
          "make_histogram: edges must be strictly increasing");
  Histogram h;
  h.dims = 1;
  h.bin_edges = {edges};
  h.counts.assign(edges.size() - 1, 0);
  for (double x : points) {
    int b = 0;
    if (locate(edges, x, &b)) ++h.clamped;
    ++h.counts[b];
    ++h.total;
  }
  return h;
}

Histogram make_histogram(std::span<const double> points, int bins) {
  require(!points.empty(), "make_histogram: need at least one point");
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  if (bins <= 0) bins = freedman_diaconis_bins(sorted);
  return make_histogram(points, uniform_edges(sorted.front(), sorted.back(), bins));
}

Histogram make_histogram_2d(std::span<const std::array<double, 2>> points,
                            const std::vector<double>& edges_x,
                            const std::vector<double>& edges_y) {
  require(!points.empty(), "make_histogram_2d: need at least one point");
  require(edges_x.size() >= 2 && edges_y.size() >= 2, "make_histogram_2d: need at least one bin");
  Histogram h;
  h.dims = 2;
  h.bin_edges = {edges_x, edges_y};
  const int ny = static_cast<int>(edges_y.size()) - 1;
  h.counts.assign((edges_x.size() - 1) * (edges_y.size() - 1), 0);
  for (const auto& pt : points) {
    int bx = 0, by = 0;
    const bool cx = locate(edges_x, pt[0], &bx);
    const bool cy = locate(edges_y, pt[1], &by);
    if (cx || cy) ++h.clamped;
    ++h.counts[bx * ny + by];
    ++h.total;
  }
  return h;
}

Histogram make_histogram_2d(std::span<const std::array<double, 2>> points, int bins_x,
                            int bins_y) {
  require(!points.empty(), "make_histogram_2d: need at least one point");
  require(bins_x >= 1 && bins_y >= 1, "make_histogram_2d: need at least one bin");
  double xlo = points[0][0], xhi = points[0][0], ylo = points[0][1], yhi = points[0][1];
  for (const auto& pt : points) {
    xlo = std::min(xlo, pt[0]);
    xhi = std::max(xhi, pt[0]);
    ylo = std::min(ylo, pt[1]);
    yhi = std::max(yhi, pt[1]);
  }
  return make_histogram_2d(points, uniform_edges(xlo, xhi, bins_x),
                           uniform_edges(ylo, yhi, bins_y));
}

BimodalityReport detect_bimodality(const Histogram& h) {
  require(h.dims == 1, "detect_bimodality: 1-d histograms only");
  BimodalityReport rep;
  const auto& edges = h.bin_edges[0];
  const int nb = static_cast<int>(h.counts.size());
  auto center = [&](int b) { return 0.5 * (edges[b] + edges[b + 1]); };
  int p1 = 0;
  for (int b = 1; b < nb; ++b)
    if (h.counts[b] > h.counts[p1]) p1 = b;
  // best second peak: maximize count among bins separated from p1 by a
  // valley below half of the candidate's own count
  int p2 = -1;
  long best = -1;
  for (int b = 0; b < nb; ++b) {
    if (b == p1) continue;
    long valley = h.counts[b];
    for (int i = std::min(b, p1) + 1; i < std::max(b, p1); ++i)
      valley = std::min(valley, h.counts[i]);
    const long smaller = std::min(h.counts[b], h.counts[p1]);
    if (2 * valley < smaller && h.counts[b] > best) {
      best = h.counts[b];
      p2 = b;
    }
  }
  if (p2 < 0) return rep;
  rep.bimodal = true;
  rep.peak1 = center(p1);
  rep.peak2 = center(p2);
  rep.count1 = h.counts[p1];
  rep.count2 = h.counts[p2];
  long valley = h.counts[p1];
  for (int i = std::min(p1, p2) + 1; i < std::max(p1, p2); ++i)
    valley = std::min(valley, h.counts[i]);
  rep.valley = valley;
  return rep;
}

std::vector<GradSqPoint> empirical_grad_sq_curve(const DescentConfig& base, long n_trials,
                                                 std::span<const long> checkpoints,
                                                 int n_threads) {
  require(n_trials >= 1, "empirical_grad_sq_curve: need at least one trial");
  const size_t nc = checkpoints.size();
  std::vector<std::vector<double>> per_trial(n_trials);
  parallel_for(n_trials, resolve_threads(n_threads), [&](long t) {
    DescentConfig cfg = base;
    cfg.trial_index = static_cast<std::uint64_t>(t);
    try {
      auto values = run_checkpoints(cfg, checkpoints);
      per_trial[t].reserve(nc);
      for (const auto& cv : values) per_trial[t].push_back(cv.grad_sq);
    } catch (const NumericOverflowError&) {
      per_trial[t].clear();  // aborted trial, excluded
    }
  });
  std::vector<GradSqPoint> out(nc);
  for (size_t c = 0; c < nc; ++c) out[c].m = checkpoints[c];
  long ok = 0;
  for (const auto& row : per_trial) {
    if (row.size() != nc) continue;
    ++ok;
    for (size_t c = 0; c < nc; ++c) out[c].mean += row[c];
  }
  require(ok > 0, "empirical_grad_sq_curve: every trial aborted");
  for (auto& pt : out) pt.mean /= ok;
  for (const auto& row : per_trial) {
    if (row.size() != nc) continue;
    for (size_t c = 0; c < nc; ++c) {
      const double dev = row[c] - out[c].mean;
      out[c].std_error += dev * dev;
    }
  }
  for (auto& pt : out)
    pt.std_error = ok > 1 ? std::sqrt(pt.std_error / (ok - 1) / ok) : 0.0;
  return out;
}

}  // namespace sgdlab
