#include "sgdlab/objectives.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace sgdlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double ObjectiveFamily::value(std::span<const double> w) const {
  require(static_cast<int>(w.size()) == dim, "objective: dimension mismatch");
  double s = 0;
  for (int i = 0; i < n_components; ++i) s += component_value(i, w);
  return s / n_components;
}

EstimatorKind EstimatorKind::minibatch(int b) {
  require(b >= 1, "estimator: batch size must be >= 1");
  return {Kind::minibatch, b};
}
EstimatorKind EstimatorKind::coordinate() { return {Kind::coordinate, 1}; }
EstimatorKind EstimatorKind::combined() { return {Kind::combined, 1}; }

void full_gradient(const ObjectiveFamily& obj, std::span<const double> w, std::span<double> out) {
  require(static_cast<int>(w.size()) == obj.dim, "full_gradient: dimension mismatch");
  require(out.size() == w.size(), "full_gradient: output size mismatch");
  thread_local std::vector<double> comp;
  comp.assign(obj.dim, 0.0);
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < obj.n_components; ++i) {
    obj.component_gradient(i, w, comp);
    for (int k = 0; k < obj.dim; ++k) out[k] += comp[k];
  }
  for (int k = 0; k < obj.dim; ++k) out[k] /= obj.n_components;
}

std::vector<double> full_gradient(const ObjectiveFamily& obj, std::span<const double> w) {
  std::vector<double> out(obj.dim);
  full_gradient(obj, w, out);
  return out;
}

void estimate_gradient(const ObjectiveFamily& obj, std::span<const double> w,
                       const EstimatorKind& kind, CounterRng& rng, std::span<double> out) {
  require(static_cast<int>(w.size()) == obj.dim, "estimate_gradient: dimension mismatch");
  const int n = obj.n_components;
  const int d = obj.dim;
  switch (kind.kind) {
    case EstimatorKind::Kind::minibatch: {
      const int b = kind.batch_size;
      require(b <= n, "estimate_gradient: batch size exceeds component count");
      thread_local std::vector<int> idx;
      thread_local std::vector<double> comp;
      idx.resize(n);
      std::iota(idx.begin(), idx.end(), 0);
      // partial Fisher-Yates: first b entries are a uniform b-subset
      for (int k = 0; k < b; ++k) {
        const int j = k + rng.uniform_int(n - k);
        std::swap(idx[k], idx[j]);
      }
      comp.assign(d, 0.0);
      std::fill(out.begin(), out.end(), 0.0);
      for (int k = 0; k < b; ++k) {
        obj.component_gradient(idx[k], w, comp);
        for (int c = 0; c < d; ++c) out[c] += comp[c];
      }
      for (int c = 0; c < d; ++c) out[c] /= b;
      return;
    }
    case EstimatorKind::Kind::coordinate: {
      thread_local std::vector<double> grad;
      grad.assign(d, 0.0);
      full_gradient(obj, w, grad);
      const int j = rng.uniform_int(d);
      std::fill(out.begin(), out.end(), 0.0);
      out[j] = d * grad[j];
      return;
    }
    case EstimatorKind::Kind::combined: {
      thread_local std::vector<double> comp;
      comp.assign(d, 0.0);
      const int i = rng.uniform_int(n);
      obj.component_gradient(i, w, comp);
      const int j = rng.uniform_int(d);
      std::fill(out.begin(), out.end(), 0.0);
      out[j] = d * comp[j];
      return;
    }
  }
}

std::vector<double> estimate_gradient(const ObjectiveFamily& obj, std::span<const double> w,
                                      const EstimatorKind& kind, CounterRng& rng) {
  std::vector<double> out(obj.dim);
  estimate_gradient(obj, w, kind, rng, out);
  return out;
}

double estimator_variance_exact(const ObjectiveFamily& obj, std::span<const double> w,
                                const EstimatorKind& kind) {
  const int n = obj.n_components;
  const int d = obj.dim;
  std::vector<double> mean = full_gradient(obj, w);
  std::vector<double> comp(d);
  switch (kind.kind) {
    case EstimatorKind::Kind::minibatch: {
      const int b = kind.batch_size;
      require(b <= n, "estimator_variance_exact: batch size exceeds component count");
      if (n == 1 || b == n) return 0.0;
      double pop = 0;  // (1/N) sum |g_i - mean|^2
      for (int i = 0; i < n; ++i) {
        obj.component_gradient(i, w, comp);
        for (int c = 0; c < d; ++c) {
          const double dev = comp[c] - mean[c];
          pop += dev * dev;
        }
      }
      pop /= n;
      // variance of a without-replacement mean of b draws
      return pop * static_cast<double>(n - b) / (static_cast<double>(b) * (n - 1));
    }
    case EstimatorKind::Kind::coordinate: {
      double g2 = 0;
      for (double x : mean) g2 += x * x;
      return (d - 1) * g2;
    }
    case EstimatorKind::Kind::combined: {
      double second = 0;  // E[|est|^2] = (d/N) sum_i |grad f_i|^2
      for (int i = 0; i < n; ++i) {
        obj.component_gradient(i, w, comp);
        for (double x : comp) second += x * x;
      }
      second *= static_cast<double>(d) / n;
      double g2 = 0;
      for (double x : mean) g2 += x * x;
      return second - g2;
    }
  }
  return 0.0;
}

ObjectiveFamily make_convex_1d() {
  ObjectiveFamily f;
  f.dim = 1;
  f.n_components = 2;
  f.label = "convex1d";
  f.component_value = [](int i, std::span<const double> w) {
    const double x = w[0];
    const double t = (i == 0) ? x - 1.0 : x + 1.0;
    return t * t;
  };
  f.component_gradient = [](int i, std::span<const double> w, std::span<double> out) {
    const double x = w[0];
    out[0] = 2.0 * ((i == 0) ? x - 1.0 : x + 1.0);
  };
  return f;
}

ObjectiveFamily make_nonconvex_1d(double sigma) {
  require(sigma > 0, "make_nonconvex_1d: sigma must be positive");
  ObjectiveFamily f;
  f.dim = 1;
  f.n_components = 2;
  f.label = "nonconvex1d:" + std::to_string(sigma);
  f.component_value = [sigma](int i, std::span<const double> w) {
    const double x = w[0];
    const double base = ((x + 3.0) * x * x - 4.0) * x + 2.0;  // x^4+3x^3-4x+2
    return (i == 0) ? base - sigma * x : base + sigma * x;
  };
  f.component_gradient = [sigma](int i, std::span<const double> w, std::span<double> out) {
    const double x = w[0];
    const double base = (4.0 * x + 9.0) * x * x - 4.0;  // 4x^3+9x^2-4
    out[0] = (i == 0) ? base - sigma : base + sigma;
  };
  return f;
}

ObjectiveFamily make_quadratic_linear_noise(int dim, const std::vector<double>& quadratic,
                                            const std::vector<LinearOffset>& offsets) {
  require(dim >= 1, "quadratic_linear_noise: dim must be >= 1");
  require(static_cast<int>(quadratic.size()) == dim * dim,
          "quadratic_linear_noise: quadratic must be dim x dim row-major");
  require(!offsets.empty(), "quadratic_linear_noise: need at least one component");
  for (const auto& o : offsets)
    require(static_cast<int>(o.c.size()) == dim, "quadratic_linear_noise: offset dimension mismatch");

  std::vector<double> csum(dim, 0.0);
  double dsum = 0.0;
  for (const auto& o : offsets) {
    for (int k = 0; k < dim; ++k) csum[k] += o.c[k];
    dsum += o.d;
  }
  for (int k = 0; k < dim; ++k)
    require(std::abs(csum[k]) <= 1e-12, "quadratic_linear_noise: offsets c_i must sum to zero");
  require(std::abs(dsum) <= 1e-12, "quadratic_linear_noise: offsets d_i must sum to zero");

  Eigen::MatrixXd q(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) q(r, c) = quadratic[r * dim + c];
  require((q - q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff()),
          "quadratic_linear_noise: quadratic must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  require(es.eigenvalues().minCoeff() >= -1e-10, "quadratic_linear_noise: quadratic must be PSD");

  auto quad = std::make_shared<std::vector<double>>(quadratic);
  auto offs = std::make_shared<std::vector<LinearOffset>>(offsets);
  ObjectiveFamily f;
  f.dim = dim;
  f.n_components = static_cast<int>(offsets.size());
  f.label = "quadratic_linear_noise";
  // f(x) = (1/2) x^T Q x, f_i = f - c_i.x - d_i
  f.component_value = [dim, quad, offs](int i, std::span<const double> w) {
    double v = 0;
    for (int r = 0; r < dim; ++r) {
      double row = 0;
      for (int c = 0; c < dim; ++c) row += (*quad)[r * dim + c] * w[c];
      v += w[r] * row;
    }
    v *= 0.5;
    const auto& o = (*offs)[i];
    for (int k = 0; k < dim; ++k) v -= o.c[k] * w[k];
    return v - o.d;
  };
  f.component_gradient = [dim, quad, offs](int i, std::span<const double> w, std::span<double> out) {
    for (int r = 0; r < dim; ++r) {
      double row = 0;
      for (int c = 0; c < dim; ++c) row += (*quad)[r * dim + c] * w[c];
      out[r] = row - (*offs)[i].c[r];
    }
  };
  return f;
}

BoundEstimate estimate_bounds(const ObjectiveFamily& obj, double radius, int n_points,
                              CounterRng& rng, const EstimatorKind& kind, int draws_per_point) {
  require(radius > 0, "estimate_bounds: radius must be positive");
  require(n_points >= 1, "estimate_bounds: need at least one sample point");
  const int d = obj.dim;
  std::vector<double> w(d), wp(d), est(d);
  BoundEstimate out;
  out.region_radius = radius;

  for (int s = 0; s < n_points; ++s) {
    // uniform in the ball |w| <= radius, by rejection from the cube
    do {
      for (int k = 0; k < d; ++k) w[k] = rng.uniform(-radius, radius);
    } while (norm(w) > radius);

    const double h = 1e-4 * std::max(1.0, norm(w));
    Eigen::MatrixXd hess(d, d);
    auto feval = [&](std::span<const double> x) { return obj.value(x); };
    const double f0 = feval(w);
    for (int i = 0; i < d; ++i) {
      wp = w;
      wp[i] = w[i] + h;
      const double fp = feval(wp);
      wp[i] = w[i] - h;
      const double fm = feval(wp);
      hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
      for (int j = i + 1; j < d; ++j) {
        wp = w;
        wp[i] = w[i] + h;
        wp[j] = w[j] + h;
        const double fpp = feval(wp);
        wp[j] = w[j] - h;
        const double fpm = feval(wp);
        wp[i] = w[i] - h;
        const double fmm = feval(wp);
        wp[j] = w[j] + h;
        const double fmp = feval(wp);
        hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
    const double spectral =
        std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
    out.hessian_bound = std::max(out.hessian_bound, spectral);

    std::vector<double> grad = full_gradient(obj, w);
    double g2 = 0;
    for (double x : grad) g2 += x * x;
    double second = 0;
    for (int t = 0; t < draws_per_point; ++t) {
      estimate_gradient(obj, w, kind, rng, est);
      double e2 = 0;
      for (double x : est) e2 += x * x;
      second += e2;
    }
    second /= draws_per_point;
    out.estimator_variance = std::max(out.estimator_variance, std::max(0.0, second - g2));
  }
  return out;
}

}  // namespace sgdlab
