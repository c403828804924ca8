#include "sgdlab/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace sgdlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Thomas algorithm for a tridiagonal system (lo, diag, up) x = rhs.
void solve_tridiagonal(std::vector<double>& lo, std::vector<double>& diag,
                       std::vector<double>& up, std::vector<double>& rhs) {
  const size_t n = diag.size();
  for (size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw std::runtime_error("cn_step: singular tridiagonal system");
    const double w = lo[i] / diag[i - 1];
    diag[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw std::runtime_error("cn_step: singular tridiagonal system");
  rhs[n - 1] /= diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

Grid1D make_grid(double x_min, double x_max, int n_cells) {
  require(x_min < x_max, "grid: x_min must be below x_max");
  require(n_cells >= 16, "grid: need at least 16 cells");
  return {x_min, x_max, n_cells};
}

std::function<double(double)> rate_from_schedule(const Schedule& s) {
  return [s](double t) {
    const long m = std::max<long>(1, static_cast<long>(std::floor(t)) + 1);
    return s.step(m);
  };
}

DriftDiffusionProblem build_problem_convex(std::function<double(double)> rate) {
  DriftDiffusionProblem p;
  p.rate = rate;
  p.drift = [rate](double x, double t) { return -2.0 * rate(t) * x; };
  p.diffusion = [rate](double /*x*/, double t) {
    const double a = rate(t);
    return 2.0 * a * a;
  };
  return p;
}

DriftDiffusionProblem build_problem_from_objective(const ObjectiveFamily& obj,
                                                   const EstimatorKind& kind,
                                                   std::function<double(double)> rate) {
  require(obj.dim == 1, "build_problem_from_objective: 1-d objectives only");
  auto family = std::make_shared<ObjectiveFamily>(obj);
  auto est = std::make_shared<EstimatorKind>(kind);
  DriftDiffusionProblem p;
  p.rate = rate;
  p.drift = [family, rate](double x, double t) {
    const double w[1] = {x};
    double g[1];
    full_gradient(*family, w, g);
    return -rate(t) * g[0];
  };
  p.diffusion = [family, est, rate](double x, double t) {
    const double w[1] = {x};
    const double a = rate(t);
    return 0.5 * a * a * estimator_variance_exact(*family, w, *est);
  };
  return p;
}

DensityState make_gaussian_density(const Grid1D& grid, double mean, double sd) {
  require(sd > 0, "gaussian density: sd must be positive");
  DensityState s;
  s.grid = grid;
  s.values.resize(grid.n_cells);
  for (int i = 0; i < grid.n_cells; ++i) {
    const double z = (grid.center(i) - mean) / sd;
    s.values[i] = std::exp(-0.5 * z * z);
  }
  normalize(s);
  return s;
}

DensityState make_mixture_density(const Grid1D& grid, double mean1, double sd1, double mean2,
                                  double sd2, double weight) {
  require(weight >= 0 && weight <= 1, "mixture density: weight must lie in [0,1]");
  DensityState a = make_gaussian_density(grid, mean1, sd1);
  DensityState b = make_gaussian_density(grid, mean2, sd2);
  for (int i = 0; i < grid.n_cells; ++i)
    a.values[i] = weight * a.values[i] + (1.0 - weight) * b.values[i];
  normalize(a);
  return a;
}

void normalize(DensityState& state) {
  double mass = 0;
  for (double v : state.values) mass += v;
  mass *= state.grid.dx();
  require(mass > 0, "normalize: zero mass");
  for (double& v : state.values) v /= mass;
}

DensityState cn_step(const DensityState& state, const DriftDiffusionProblem& problem, double dt) {
  require(dt > 0, "cn_step: dt must be positive");
  const Grid1D& grid = state.grid;
  const int n = grid.n_cells;
  const double dx = grid.dx();
  const double th = state.time + 0.5 * dt;  // coefficient time level

  // Face drift b_k at x_{k-1/2} (faces k = 1..n-1 are interior), cell
  // diffusion D_i.  Fluxes through the two walls are zero.
  std::vector<double> b(n + 1, 0.0), D(n, 0.0);
  double max_drift = 0.0;
  for (int k = 1; k < n; ++k) {
    b[k] = problem.drift(grid.x_min + k * dx, th);
    max_drift = std::max(max_drift, std::abs(b[k]));
  }
  for (int i = 0; i < n; ++i) {
    D[i] = problem.diffusion(grid.center(i), th);
    require(D[i] >= 0, "cn_step: negative diffusion coefficient");
  }
  require(max_drift * dt <= dx * (1.0 + 1e-12), "cn_step: dt exceeds dx / max |drift|");

  // Flux at interior face k:
  //   F_k = b_k * rho_up - (D_k rho_k - D_{k-1} rho_{k-1}) / dx,
  // upwind cell chosen by sign(b_k); ties use the centered average.
  // Divergence M rho = (F_{k+1} - F_k) / dx is tridiagonal; assemble
  // (I + dt/2 M) rho_new = (I - dt/2 M) rho_old.
  std::vector<double> ml(n, 0.0), md(n, 0.0), mu(n, 0.0);
  auto add_face = [&](int k) {
    // contribution of face k to rows k-1 and k
    double cl, cr;  // flux coefficients on rho_{k-1}, rho_k
    if (b[k] > 0) {
      cl = b[k];
      cr = 0.0;
    } else if (b[k] < 0) {
      cl = 0.0;
      cr = b[k];
    } else {
      cl = cr = 0.5 * b[k];  // = 0; centered for exact symmetry
    }
    cl += D[k - 1] / dx;
    cr -= D[k] / dx;
    // row k-1: +F_k / dx, row k: -F_k / dx
    md[k - 1] += cl / dx;
    mu[k - 1] += cr / dx;
    ml[k] -= cl / dx;
    md[k] -= cr / dx;
  };
  for (int k = 1; k < n; ++k) add_face(k);

  std::vector<double> lo(n), diag(n), up(n), rhs(n);
  const double h = 0.5 * dt;
  for (int i = 0; i < n; ++i) {
    lo[i] = h * ml[i];
    diag[i] = 1.0 + h * md[i];
    up[i] = h * mu[i];
  }
  for (int i = 0; i < n; ++i) {
    double v = (1.0 - h * md[i]) * state.values[i];
    if (i > 0) v -= h * ml[i] * state.values[i - 1];
    if (i + 1 < n) v -= h * mu[i] * state.values[i + 1];
    rhs[i] = v;
  }
  solve_tridiagonal(lo, diag, up, rhs);

  DensityState out;
  out.grid = grid;
  out.values = std::move(rhs);
  out.time = state.time + dt;
  return out;
}

EvolveResult evolve(const DensityState& initial, const DriftDiffusionProblem& problem, double T,
                    double dt, int n_checkpoints) {
  require(T >= 0, "evolve: T must be nonnegative");
  EvolveResult result;
  result.final = initial;
  result.min_density = *std::min_element(initial.values.begin(), initial.values.end());
  if (T == 0) return result;

  const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(T / dt)));
  const double step_dt = T / static_cast<double>(n_steps);
  long next_checkpoint = 1;
  double mass_prev = density_moments(result.final).mass;
  for (long s = 1; s <= n_steps; ++s) {
    result.final = cn_step(result.final, problem, step_dt);
    const double mass = density_moments(result.final).mass;
    if (mass_prev != 0)
      result.max_mass_drift =
          std::max(result.max_mass_drift, std::abs(mass - mass_prev) / std::abs(mass_prev));
    mass_prev = mass;
    const double mn = *std::min_element(result.final.values.begin(), result.final.values.end());
    result.min_density = std::min(result.min_density, mn);
    if (n_checkpoints > 0 &&
        s * n_checkpoints >= next_checkpoint * n_steps) {
      result.checkpoints.push_back(result.final);
      ++next_checkpoint;
    }
  }
  if (result.min_density < -1e-12)
    result.warnings.push_back("density undershoot " + std::to_string(result.min_density) +
                              "; reduce dt");
  return result;
}

DensityMoments density_moments(const DensityState& state) {
  const Grid1D& g = state.grid;
  const int n = g.n_cells;
  DensityMoments m;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;  // trapezoid over centers
    const double x = g.center(i);
    const double rho = state.values[i];
    m.mass += w * rho;
    m.mean += w * x * rho;
    m.second_moment += w * x * x * rho;
  }
  m.mass *= g.dx();
  m.mean *= g.dx();
  m.second_moment *= g.dx();
  return m;
}

double second_moment_ode(const std::function<double(double)>& rate, double f0, double T,
                         double dt) {
  require(f0 >= 0, "second_moment_ode: F0 must be nonnegative");
  require(dt > 0, "second_moment_ode: dt must be positive");
  auto rhs = [&](double t, double f) {
    const double a = rate(t);
    return -4.0 * a * f + 4.0 * a * a;
  };
  const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(T / dt)));
  const double h = T / static_cast<double>(n_steps);
  double f = f0, t = 0.0;
  for (long s = 0; s < n_steps; ++s) {
    const double k1 = rhs(t, f);
    const double k2 = rhs(t + 0.5 * h, f + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, f + 0.5 * h * k2);
    const double k4 = rhs(t + h, f + h * k3);
    f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return f;
}

}  // namespace sgdlab
