#include "sgdlab/games.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace sgdlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double ipow(double x, int n) {
  double r = 1.0, b = x;
  while (n > 0) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

// phi^n in log space for positive phi, direct powering otherwise.
double phi_pow(double phi, int n) {
  if (n == 0) return 1.0;
  if (phi > 0) return std::exp(static_cast<double>(n) * std::log(phi));
  return ipow(phi, n);
}

// Expands embedded coordinates to the full strategy vector (last entry is
// one minus the sum).
void embed(std::span<const double> tilde, std::span<double> full) {
  double s = 0;
  for (size_t i = 0; i < tilde.size(); ++i) {
    full[i] = tilde[i];
    s += tilde[i];
  }
  full[tilde.size()] = 1.0 - s;
}

struct AffineTerms {
  // phi_j(x) = a[j] + g[j] . x
  std::vector<double> a;
  std::vector<std::vector<double>> g;
};

AffineTerms affine_terms(const MatrixGame& game, double scale) {
  AffineTerms t;
  const int n = game.cols;
  t.a.resize(game.rows);
  t.g.assign(game.rows, std::vector<double>(n - 1));
  for (int j = 0; j < game.rows; ++j) {
    t.a[j] = game.entry(j, n - 1) / scale;
    for (int k = 0; k < n - 1; ++k) t.g[j][k] = (game.entry(j, k) - game.entry(j, n - 1)) / scale;
  }
  return t;
}

}  // namespace

MatrixGame make_matrix_game(int rows, int cols, std::vector<double> payoff) {
  require(rows >= 1 && cols >= 2, "matrix game: need at least 1 row and 2 columns");
  require(static_cast<int>(payoff.size()) == rows * cols, "matrix game: payoff size mismatch");
  MatrixGame g;
  g.rows = rows;
  g.cols = cols;
  g.payoff = std::move(payoff);
  g.eta = *std::min_element(g.payoff.begin(), g.payoff.end());
  require(g.eta > 0, "matrix game: payoffs must be strictly positive");
  return g;
}

AsyncCoalitionGame make_coalition_game(int n1, int n2, std::vector<std::vector<double>> slices,
                                       double offset) {
  require(n1 >= 2 && n2 >= 2, "coalition game: both players need at least 2 strategies");
  require(!slices.empty(), "coalition game: need at least one max term");
  double min_entry = slices[0][0];
  for (const auto& b : slices) {
    require(static_cast<int>(b.size()) == n1 * n2, "coalition game: slice size mismatch");
    min_entry = std::min(min_entry, *std::min_element(b.begin(), b.end()));
  }
  // bilinear forms attain their extrema over the simplices at vertex pairs
  require(min_entry + offset > 0,
          "coalition game: max terms must be positive on the simplices after offset");
  AsyncCoalitionGame g;
  g.n1 = n1;
  g.n2 = n2;
  g.slices = std::move(slices);
  g.offset = offset;
  return g;
}

SmoothedGame smooth(const GameRef& game, int p, std::optional<bool> rescale) {
  return smooth(game, p, rescale, std::nullopt);
}

SmoothedGame smooth(const GameRef& game, int p, std::optional<bool> rescale,
                    std::optional<double> rescale_factor) {
  require(p >= 1, "smooth: p must be >= 1");
  const bool do_rescale = rescale.value_or(p >= 10);

  SmoothedGame out;
  out.base = game;
  out.p = p;

  if (const auto* mg = std::get_if<MatrixGame>(&game)) {
    double s = 1.0;
    if (do_rescale)
      s = rescale_factor.value_or(*std::max_element(mg->payoff.begin(), mg->payoff.end()));
    out.rescale_factor = s;
    out.ambient_dim = mg->cols - 1;
    out.n_terms = mg->rows;
    out.simplex_groups = {std::vector<int>(out.ambient_dim)};
    for (int k = 0; k < out.ambient_dim; ++k) out.simplex_groups[0][k] = k;

    auto terms = std::make_shared<AffineTerms>(affine_terms(*mg, s));
    const int dim = out.ambient_dim;
    out.objective.dim = dim;
    out.objective.n_components = out.n_terms;
    out.objective.component_value = [terms, p](int j, std::span<const double> x) {
      double phi = terms->a[j];
      for (size_t k = 0; k < x.size(); ++k) phi += terms->g[j][k] * x[k];
      return phi_pow(phi, p);
    };
    out.objective.component_gradient = [terms, p](int j, std::span<const double> x,
                                                  std::span<double> grad) {
      double phi = terms->a[j];
      for (size_t k = 0; k < x.size(); ++k) phi += terms->g[j][k] * x[k];
      const double coef = p * phi_pow(phi, p - 1);
      for (size_t k = 0; k < x.size(); ++k) grad[k] = coef * terms->g[j][k];
    };
  } else {
    const auto& cg = std::get<AsyncCoalitionGame>(game);
    double s = 1.0;
    if (do_rescale) {
      if (rescale_factor) {
        s = *rescale_factor;
      } else {
        // effective bilinear coefficients carry the offset
        double mx = 0;
        for (const auto& b : cg.slices)
          for (double v : b) mx = std::max(mx, std::abs(v + cg.offset));
        s = mx;
      }
    }
    out.rescale_factor = s;
    out.ambient_dim = (cg.n1 - 1) + (cg.n2 - 1);
    out.n_terms = static_cast<int>(cg.slices.size());
    std::vector<int> grp1, grp2;
    for (int k = 0; k < cg.n1 - 1; ++k) grp1.push_back(k);
    for (int k = 0; k < cg.n2 - 1; ++k) grp2.push_back(cg.n1 - 1 + k);
    out.simplex_groups = {grp1, grp2};

    auto data = std::make_shared<AsyncCoalitionGame>(cg);
    const double inv_s = 1.0 / s;
    const int n1 = cg.n1, n2 = cg.n2;
    out.objective.dim = out.ambient_dim;
    out.objective.n_components = out.n_terms;
    auto phi_of = [data, inv_s, n1, n2](int j, std::span<const double> x) {
      thread_local std::vector<double> y1, y2;
      y1.resize(n1);
      y2.resize(n2);
      embed(x.subspan(0, n1 - 1), y1);
      embed(x.subspan(n1 - 1), y2);
      const auto& b = data->slices[j];
      double v = 0;
      for (int r = 0; r < n1; ++r) {
        double row = 0;
        for (int c = 0; c < n2; ++c) row += b[r * n2 + c] * y2[c];
        v += y1[r] * row;
      }
      return (v + data->offset) * inv_s;
    };
    out.objective.component_value = [phi_of, p](int j, std::span<const double> x) {
      return phi_pow(phi_of(j, x), p);
    };
    out.objective.component_gradient = [data, phi_of, inv_s, n1, n2, p](
                                           int j, std::span<const double> x,
                                           std::span<double> grad) {
      thread_local std::vector<double> y1, y2;
      y1.resize(n1);
      y2.resize(n2);
      embed(x.subspan(0, n1 - 1), y1);
      embed(x.subspan(n1 - 1), y2);
      const auto& b = data->slices[j];
      const double coef = p * phi_pow(phi_of(j, x), p - 1) * inv_s;
      for (int a = 0; a < n1 - 1; ++a) {
        double d = 0;
        for (int c = 0; c < n2; ++c) d += (b[a * n2 + c] - b[(n1 - 1) * n2 + c]) * y2[c];
        grad[a] = coef * d;
      }
      for (int c = 0; c < n2 - 1; ++c) {
        double d = 0;
        for (int r = 0; r < n1; ++r) d += y1[r] * (b[r * n2 + c] - b[r * n2 + (n2 - 1)]);
        grad[n1 - 1 + c] = coef * d;
      }
    };
  }

  out.box_lower.assign(out.ambient_dim, 0.0);
  out.box_upper.assign(out.ambient_dim, 1.0);
  out.objective.label = "game";
  return out;
}

std::vector<double> phi_values(const SmoothedGame& g, std::span<const double> point) {
  require(static_cast<int>(point.size()) == g.ambient_dim, "phi_values: dimension mismatch");
  // recover phi from phi^p is lossy; recompute from the base game
  std::vector<double> out(g.n_terms);
  if (const auto* mg = std::get_if<MatrixGame>(&g.base)) {
    AffineTerms t = affine_terms(*mg, g.rescale_factor);
    for (int j = 0; j < g.n_terms; ++j) {
      double phi = t.a[j];
      for (int k = 0; k < g.ambient_dim; ++k) phi += t.g[j][k] * point[k];
      out[j] = phi;
    }
    return out;
  }
  const auto& cg = std::get<AsyncCoalitionGame>(g.base);
  std::vector<double> y1(cg.n1), y2(cg.n2);
  embed(point.subspan(0, cg.n1 - 1), y1);
  embed(point.subspan(cg.n1 - 1), y2);
  for (int j = 0; j < g.n_terms; ++j) {
    const auto& b = cg.slices[j];
    double v = 0;
    for (int r = 0; r < cg.n1; ++r)
      for (int c = 0; c < cg.n2; ++c) v += y1[r] * b[r * cg.n2 + c] * y2[c];
    out[j] = (v + cg.offset) / g.rescale_factor;
  }
  return out;
}

double lp_value(const SmoothedGame& g, std::span<const double> point) {
  const std::vector<double> phis = phi_values(g, point);
  double sum = 0;
  for (double phi : phis) sum += phi_pow(phi, g.p);
  return std::pow(sum, 1.0 / g.p) * g.rescale_factor;
}

double lp_gap_bound(int p, int n_terms) {
  require(p >= 1 && n_terms >= 1, "lp_gap_bound: p and n must be >= 1");
  return std::exp(std::log(static_cast<double>(n_terms)) / p);
}

ConvexityReport convexity_witness(const SmoothedGame& g,
                                  const std::vector<std::vector<double>>& sample_points) {
  ConvexityReport rep;
  rep.min_component_eigenvalue = std::numeric_limits<double>::infinity();
  rep.min_sum_eigenvalue = std::numeric_limits<double>::infinity();
  const int d = g.ambient_dim;
  std::vector<double> wp(d);
  for (const auto& x : sample_points) {
    require(static_cast<int>(x.size()) == d, "convexity_witness: sample dimension mismatch");
    double nrm = 0;
    for (double v : x) nrm += v * v;
    const double h = 1e-4 * std::max(1.0, std::sqrt(nrm));
    Eigen::MatrixXd sum_h = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < g.n_terms; ++j) {
      auto feval = [&](std::span<const double> pt) { return g.objective.component_value(j, pt); };
      Eigen::MatrixXd hess(d, d);
      const double f0 = feval(x);
      for (int i = 0; i < d; ++i) {
        wp = x;
        wp[i] += h;
        const double fp = feval(wp);
        wp[i] = x[i] - h;
        const double fm = feval(wp);
        hess(i, i) = (fp - 2 * f0 + fm) / (h * h);
        for (int k = i + 1; k < d; ++k) {
          wp = x;
          wp[i] += h;
          wp[k] += h;
          const double fpp = feval(wp);
          wp[k] = x[k] - h;
          const double fpm = feval(wp);
          wp[i] = x[i] - h;
          const double fmm = feval(wp);
          wp[k] = x[k] + h;
          const double fmp = feval(wp);
          hess(i, k) = hess(k, i) = (fpp - fpm - fmp + fmm) / (4 * h * h);
        }
      }
      sum_h += hess;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
      rep.min_component_eigenvalue =
          std::min(rep.min_component_eigenvalue, es.eigenvalues().minCoeff());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum_h);
    rep.min_sum_eigenvalue = std::min(rep.min_sum_eigenvalue, es.eigenvalues().minCoeff());
    ++rep.n_points;
  }
  rep.pass = rep.n_points > 0 && rep.min_component_eigenvalue >= -1e-8;
  return rep;
}

namespace {

ExactSolution solve_2x2(const MatrixGame& game) {
  ExactSolution sol;
  require(game.rows == 2 && game.cols == 2, "exact_solution: generic games must be 2x2");
  const double a11 = game.entry(0, 0), a12 = game.entry(0, 1);
  const double a21 = game.entry(1, 0), a22 = game.entry(1, 1);
  auto value_at = [&](double y) {
    return std::max(a11 * y + a12 * (1 - y), a21 * y + a22 * (1 - y));
  };
  const double denom = (a11 - a21) + (a22 - a12);
  double best_y;
  if (denom != 0) {
    const double y = (a22 - a12) / denom;  // row indifference
    best_y = std::clamp(y, 0.0, 1.0);
  } else {
    best_y = value_at(0.0) <= value_at(1.0) ? 0.0 : 1.0;
  }
  for (double corner : {0.0, 1.0})
    if (value_at(corner) < value_at(best_y)) best_y = corner;
  sol.available = true;
  sol.global_minimizers = {{best_y}};
  sol.value = value_at(best_y);
  return sol;
}

}  // namespace

ExactSolution exact_solution(const MatrixGame& game) { return solve_2x2(game); }

ExactSolution exact_solution(const std::string& name) {
  ExactSolution sol;
  if (name == "ex62") {
    sol.available = true;
    sol.global_minimizers = {{2.0 / 3.0}};
    sol.value = 5.0 / 3.0;  // phi_1 = phi_2 at the indifference point
    return sol;
  }
  if (name == "ex63") {
    sol.available = true;
    sol.global_minimizers = {{1.0 / 3.0, 1.0 / 3.0}};
    sol.value = 2.0;
    return sol;
  }
  if (name == "ex64") {
    sol.available = true;
    sol.global_minimizers = {{0.0, 0.0}, {1.0, 1.0}};
    sol.value = 2.0;
    const double s = std::sqrt(17.0);
    sol.exterior_zeros = {{(3.0 + s) / 2.0, (-1.0 + s) / 2.0},
                          {(3.0 - s) / 2.0, (-1.0 - s) / 2.0}};
    return sol;
  }
  if (name == "ex66") {
    sol.available = true;
    const double w = 4.0 - std::sqrt(12.0);
    const double z = 3.0 * w / (4.0 - w);
    sol.global_minimizers = {{w, z}};
    sol.value = 2.0 + z - w;  // = 4 sqrt(3) - 5 on the dividing curve
    sol.exterior_zeros = {{0.0, 2.0}, {-1.0, 1.0}};
    return sol;
  }
  if (name == "ex67") {
    sol.available = true;
    // coordinates (y1, y2, z1, z2); payoff is symmetric under swapping the
    // two coalition players, so each minimizer appears with its mirror
    sol.global_minimizers = {{1, 0, 0, 0.5},       {0, 1, 0.5, 0},   {0, 0, 0.5, 0.5},
                             {0, 0.5, 1, 0},       {0.5, 0, 0, 1},   {0.5, 0.5, 0, 0}};
    sol.local_minimizers = {
        {0, 1.0 / 3, 2.0 / 3, 1.0 / 3}, {2.0 / 3, 1.0 / 3, 0, 1.0 / 3},
        {1.0 / 3, 0, 1.0 / 3, 2.0 / 3}, {1.0 / 3, 2.0 / 3, 1.0 / 3, 0},
        {0, 2.0 / 3, 2.0 / 3, 0},       {2.0 / 3, 0, 0, 2.0 / 3}};
    sol.value = 1.5;
    return sol;
  }
  if (name == "ex67-reduced") {
    sol.available = true;
    // (y2, z1, z2) after restricting y1 = 0; the third global is the
    // player-swap mirror of (1, 1/2, 0), which also satisfies y1 = 0
    sol.global_minimizers = {{1, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 1, 0}};
    sol.local_minimizers = {{1.0 / 3, 2.0 / 3, 1.0 / 3}, {2.0 / 3, 2.0 / 3, 0}};
    sol.value = 1.5;
    return sol;
  }
  return sol;  // not available
}

std::vector<std::string> catalog_names() {
  return {"ex62", "ex63", "ex64", "ex66", "ex67", "ex67-reduced"};
}

GameRef catalog_game(const std::string& name) {
  if (name == "ex62") return make_matrix_game(2, 2, {1, 3, 2, 1});
  if (name == "ex63") return make_matrix_game(3, 3, {2, 1, 3, 3, 2, 1, 1, 3, 2});
  if (name == "ex64")
    return make_coalition_game(2, 2, {{2, 1, 3, 2}, {2, 5, 1, 2}}, 0.0);
  if (name == "ex66")
    return make_coalition_game(2, 2, {{2, 1, 3, 2}, {2, 2.5, 1, 2}}, 0.0);
  if (name == "ex67" || name == "ex67-reduced") {
    // psi_j = 2 y.z - y_j - z_j as a bilinear slice: 2I - e_j 1^T - 1 e_j^T
    std::vector<std::vector<double>> slices;
    for (int j = 0; j < 3; ++j) {
      std::vector<double> b(9, 0.0);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          double v = (r == c) ? 2.0 : 0.0;
          if (r == j) v -= 1.0;
          if (c == j) v -= 1.0;
          b[r * 3 + c] = v;
        }
      slices.push_back(std::move(b));
    }
    if (name == "ex67") return make_coalition_game(3, 3, std::move(slices), 2.0);
    // restrict y1 = 0: drop the first row of each slice
    std::vector<std::vector<double>> reduced;
    for (const auto& b : slices)
      reduced.push_back({b[3], b[4], b[5], b[6], b[7], b[8]});
    return make_coalition_game(2, 3, std::move(reduced), 2.0);
  }
  throw std::invalid_argument("unknown catalog game '" + name + "'");
}

PenaltySpec make_penalty(const SmoothedGame& g, double strength, int exponent) {
  require(strength > 0, "make_penalty: strength must be positive");
  require(exponent >= 1, "make_penalty: exponent must be >= 1");
  PenaltySpec pen;
  pen.lower = g.box_lower;
  pen.upper = g.box_upper;
  pen.strength = strength;
  pen.exponent = exponent;
  for (const auto& grp : g.simplex_groups)
    if (grp.size() >= 2) pen.sum_groups.push_back({grp, 1.0});
  return pen;
}

}  // namespace sgdlab
