#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sgdlab/descent.hpp"
#include "sgdlab/objectives.hpp"

namespace sgdlab {

// Two-player zero-sum game min_y max_j A_j y with strictly positive payoffs.
struct MatrixGame {
  int rows = 0;  // number of max terms
  int cols = 0;  // strategy dimension of the minimizing player
  std::vector<double> payoff;  // row-major
  double eta = 0.0;            // positivity floor, min entry

  double entry(int r, int c) const { return payoff[r * cols + c]; }
};

MatrixGame make_matrix_game(int rows, int cols, std::vector<double> payoff);

// (n-1) vs 1 coalition game with bilinear max terms
// phi_j(y1, y2) = y1^T B_j y2 + offset over a product of simplices.
struct AsyncCoalitionGame {
  int n1 = 0;  // strategies of coalition player 1
  int n2 = 0;  // strategies of coalition player 2
  std::vector<std::vector<double>> slices;  // each n1 x n2 row-major
  double offset = 0.0;
};

AsyncCoalitionGame make_coalition_game(int n1, int n2, std::vector<std::vector<double>> slices,
                                       double offset);

using GameRef = std::variant<MatrixGame, AsyncCoalitionGame>;

// l^p smoothing: the max terms become objective components phi_j^p on the
// simplex-embedded coordinates (last coordinate of each strategy eliminated).
// With rescale, all payoffs are first divided by the largest |phi| datum so
// large p stays inside double range; the argmin is unchanged.
struct SmoothedGame {
  GameRef base;
  int p = 2;
  double rescale_factor = 1.0;  // raw phi = rescale_factor * stored phi
  int ambient_dim = 0;
  int n_terms = 0;
  ObjectiveFamily objective;  // components phi_j(x)^p, full value = Phi_p
  std::vector<double> box_lower, box_upper;      // feasible box of the embedding
  std::vector<std::vector<int>> simplex_groups;  // embedded indices per player simplex
  std::string name;
};

// rescale: unset picks the default (on for p >= 10).  The factor defaults to
// the largest payoff datum; an explicit factor overrides it.
SmoothedGame smooth(const GameRef& game, int p, std::optional<bool> rescale = std::nullopt);
SmoothedGame smooth(const GameRef& game, int p, std::optional<bool> rescale,
                    std::optional<double> rescale_factor);

// Raw (pre-power, rescaled) max terms at the embedded point.
std::vector<double> phi_values(const SmoothedGame& g, std::span<const double> point);

// l^p value (N * Phi_p)^{1/p} in original payoff units.
double lp_value(const SmoothedGame& g, std::span<const double> point);

// Worst-case multiplicative gap e^{ln(n)/p} between the l^p norm and the max.
double lp_gap_bound(int p, int n_terms);

// Finite-difference Hessians of each component phi_j^p (and of their sum) at
// the sample points; passes when the smallest component eigenvalue is above
// -1e-8.
struct ConvexityReport {
  double min_component_eigenvalue = 0.0;
  double min_sum_eigenvalue = 0.0;
  bool pass = false;
  int n_points = 0;
};

ConvexityReport convexity_witness(const SmoothedGame& g,
                                  const std::vector<std::vector<double>>& sample_points);

// Reference solutions for catalog games (embedded coordinates) and generic
// 2x2 matrix games.
struct ExactSolution {
  bool available = false;
  std::vector<std::vector<double>> global_minimizers;
  std::vector<std::vector<double>> local_minimizers;
  double value = 0.0;  // minimax value in original payoff units
  std::vector<std::vector<double>> exterior_zeros;  // common zeros of all phi_j, if any
};

ExactSolution exact_solution(const std::string& catalog_name);
ExactSolution exact_solution(const MatrixGame& game);  // 2x2 only

// Catalog: ex62, ex63, ex64, ex66, ex67, ex67-reduced.
std::vector<std::string> catalog_names();
GameRef catalog_game(const std::string& name);

// Box penalty over the embedding's feasible box, plus a sum term per player
// simplex with more than one embedded coordinate.
PenaltySpec make_penalty(const SmoothedGame& g, double strength, int exponent);

}  // namespace sgdlab
