#include "sgdlab/descent.hpp"

#include <algorithm>
#include <cmath>

namespace sgdlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double grad_sq_of(const ObjectiveFamily& obj, std::span<const double> w) {
  thread_local std::vector<double> g;
  g.assign(obj.dim, 0.0);
  full_gradient(obj, w, g);
  double s = 0;
  for (double x : g) s += x * x;
  return s;
}

}  // namespace

double penalty_value(const PenaltySpec& pen, std::span<const double> w) {
  double v = 0;
  for (size_t k = 0; k < w.size(); ++k) {
    const double below = pen.lower[k] - w[k];
    const double above = w[k] - pen.upper[k];
    if (below > 0) v += pen.strength * std::pow(below, pen.exponent);
    if (above > 0) v += pen.strength * std::pow(above, pen.exponent);
  }
  for (const auto& grp : pen.sum_groups) {
    double s = 0;
    for (int k : grp.indices) s += w[k];
    if (s > grp.limit) v += pen.strength * std::pow(s - grp.limit, pen.exponent);
  }
  return v;
}

void penalty_gradient(const PenaltySpec& pen, std::span<const double> w, std::span<double> out) {
  for (size_t k = 0; k < w.size(); ++k) {
    out[k] = 0;
    const double below = pen.lower[k] - w[k];
    const double above = w[k] - pen.upper[k];
    if (below > 0) out[k] -= pen.strength * pen.exponent * std::pow(below, pen.exponent - 1);
    if (above > 0) out[k] += pen.strength * pen.exponent * std::pow(above, pen.exponent - 1);
  }
  for (const auto& grp : pen.sum_groups) {
    double s = 0;
    for (int k : grp.indices) s += w[k];
    if (s > grp.limit) {
      const double g = pen.strength * pen.exponent * std::pow(s - grp.limit, pen.exponent - 1);
      for (int k : grp.indices) out[k] += g;
    }
  }
}

std::vector<double> gd_step(const ObjectiveFamily& obj, std::span<const double> w, double alpha) {
  require(alpha > 0, "gd_step: alpha must be positive");
  std::vector<double> g = full_gradient(obj, w);
  if (!all_finite(g))
    throw NumericOverflowError("gd_step: non-finite gradient", {w.begin(), w.end()}, 0);
  std::vector<double> out(w.begin(), w.end());
  for (size_t k = 0; k < out.size(); ++k) out[k] -= alpha * g[k];
  return out;
}

std::vector<double> sgd_step(const ObjectiveFamily& obj, std::span<const double> w, double alpha,
                             const EstimatorKind& kind, CounterRng& rng) {
  require(alpha > 0, "sgd_step: alpha must be positive");
  std::vector<double> g = estimate_gradient(obj, w, kind, rng);
  if (!all_finite(g))
    throw NumericOverflowError("sgd_step: non-finite gradient estimate", {w.begin(), w.end()}, 0);
  std::vector<double> out(w.begin(), w.end());
  for (size_t k = 0; k < out.size(); ++k) out[k] -= alpha * g[k];
  return out;
}

std::vector<double> penalized_step(const ObjectiveFamily& obj, std::span<const double> w,
                                   double alpha, const EstimatorKind& kind, CounterRng& rng,
                                   const PenaltySpec& pen) {
  std::vector<double> out = sgd_step(obj, w, alpha, kind, rng);
  std::vector<double> pg(w.size());
  penalty_gradient(pen, w, pg);
  const double scale = pen.scaled_by_alpha ? alpha : 1.0;
  for (size_t k = 0; k < out.size(); ++k) out[k] -= scale * pg[k];
  return out;
}

namespace {

// Shared iteration core.  Calls visit(m, w) at every state w_m (before the
// step from m), m = 1..M, and once more with m = M+1 for the final state.
template <class Visit>
bool iterate(const DescentConfig& cfg, Visit&& visit, long* abort_at, std::vector<double>* last) {
  const ObjectiveFamily& obj = *cfg.objective;
  std::vector<double> w = cfg.initial_point;
  std::vector<double> g(obj.dim), pg(obj.dim);
  for (long m = 1; m <= cfg.n_iterations; ++m) {
    visit(m, w);
    const double alpha = cfg.schedule.step(m);
    if (cfg.estimator) {
      CounterRng rng(cfg.seed, cfg.trial_index, static_cast<std::uint64_t>(m));
      estimate_gradient(obj, w, *cfg.estimator, rng, g);
    } else {
      full_gradient(obj, w, g);
    }
    if (cfg.penalty) {
      // box-penalty gradient at the pre-step iterate
      penalty_gradient(*cfg.penalty, w, pg);
      const double scale = cfg.penalty->scaled_by_alpha ? alpha : 1.0;
      for (int k = 0; k < obj.dim; ++k) w[k] -= alpha * g[k] + scale * pg[k];
    } else {
      for (int k = 0; k < obj.dim; ++k) w[k] -= alpha * g[k];
    }
    if (!all_finite(w)) {
      *abort_at = m;
      return false;
    }
  }
  visit(cfg.n_iterations + 1, w);
  *last = std::move(w);
  return true;
}

}  // namespace

TrajectoryRecord run(const DescentConfig& cfg) {
  require(cfg.objective != nullptr, "run: objective not set");
  require(static_cast<int>(cfg.initial_point.size()) == cfg.objective->dim,
          "run: initial point dimension mismatch");
  require(cfg.n_iterations >= 1, "run: need at least one iteration");
  require(cfg.record_every >= 1, "run: record_every must be >= 1");
  if (cfg.estimator && cfg.estimator->kind == EstimatorKind::Kind::minibatch)
    require(cfg.estimator->batch_size <= cfg.objective->n_components,
            "run: batch size exceeds component count");
  if (cfg.penalty)
    require(cfg.penalty->lower.size() == cfg.initial_point.size() &&
                cfg.penalty->upper.size() == cfg.initial_point.size(),
            "run: penalty box dimension mismatch");

  TrajectoryRecord rec;
  rec.seed = cfg.seed;
  const ObjectiveFamily& obj = *cfg.objective;
  std::vector<double> last_seen = cfg.initial_point;
  auto visit = [&](long m, const std::vector<double>& w) {
    last_seen = w;
    if (m > cfg.n_iterations) return;  // final state goes to final_point
    if ((m - 1) % cfg.record_every != 0) return;
    TrajectoryPoint pt;
    pt.m = m;
    pt.w = w;
    pt.f = obj.value(w);
    pt.grad_sq = grad_sq_of(obj, w);
    pt.alpha = cfg.schedule.step(m);
    rec.iterations.push_back(std::move(pt));
  };
  long abort_at = 0;
  std::vector<double> last;
  if (iterate(cfg, visit, &abort_at, &last)) {
    rec.final_point = std::move(last);
  } else {
    rec.aborted = true;
    rec.abort_iteration = abort_at;
    rec.final_point = std::move(last_seen);
  }
  return rec;
}

std::vector<CheckpointValue> run_checkpoints(const DescentConfig& cfg,
                                             std::span<const long> checkpoints) {
  require(cfg.objective != nullptr, "run_checkpoints: objective not set");
  require(std::is_sorted(checkpoints.begin(), checkpoints.end()),
          "run_checkpoints: checkpoints must be sorted");
  require(checkpoints.empty() || checkpoints.back() <= cfg.n_iterations + 1,
          "run_checkpoints: checkpoint beyond iteration budget");
  const ObjectiveFamily& obj = *cfg.objective;
  std::vector<CheckpointValue> out;
  size_t next = 0;
  auto visit = [&](long m, const std::vector<double>& w) {
    if (next < checkpoints.size() && checkpoints[next] == m) {
      CheckpointValue cv;
      cv.m = m;
      cv.w = w;
      cv.f = obj.value(w);
      cv.grad_sq = grad_sq_of(obj, w);
      out.push_back(std::move(cv));
      ++next;
    }
  };
  long abort_at = 0;
  std::vector<double> last;
  if (!iterate(cfg, visit, &abort_at, &last))
    throw NumericOverflowError("run_checkpoints: non-finite iterate", {}, abort_at);
  return out;
}

std::vector<double> time_average_sample(const TrajectoryRecord& traj, CounterRng& rng) {
  require(!traj.iterations.empty(), "time_average_sample: empty trajectory");
  for (size_t i = 0; i < traj.iterations.size(); ++i)
    require(traj.iterations[i].m == static_cast<long>(i + 1),
            "time_average_sample: trajectory must be recorded every iteration");
  double total = 0;
  for (const auto& pt : traj.iterations) total += pt.alpha;
  require(total > 0, "time_average_sample: nonpositive weight total");
  const double u = rng.uniform() * total;
  double acc = 0;
  for (const auto& pt : traj.iterations) {
    acc += pt.alpha;
    if (u < acc) return pt.w;
  }
  return traj.iterations.back().w;
}

}  // namespace sgdlab
