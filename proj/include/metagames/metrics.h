#ifndef METAGAMES_METRICS_H_
#define METAGAMES_METRICS_H_

#include <vector>

#include "metagames/common.h"
#include "metagames/games.h"

namespace metagames {

struct GapReport {
  double duality_gap = 0.0;
  std::vector<double> ne_gap_per_player;
  double cce_gap = 0.0;
  double ce_gap = 0.0;
  double svi_residual = 0.0;
  double welfare = 0.0;
  double robust_poa_bound = 0.0;
  double path_length_second_order = 0.0;
};

// Minimax pair in the loss orientation: x minimizes and y maximizes
// x^T game.loss_matrix() y, and `value` is the game value.
struct NashSolution {
  Vec x;
  Vec y;
  double value = 0.0;
};

// Dense-tableau simplex with Bland's rule on
//   max 1^T w  s.t.  B^T w <= 1, w >= 0,   B = loss + shift > 0.
// x is read from w and y from the duals of the slack columns.
NashSolution solve_nash_lp(const MatrixGame& game);

// max_y x^T A y - min_x x^T A y with A the loss matrix.
double duality_gap(const MatrixGame& game, const Vec& x, const Vec& y);

// Best unilateral improvement for each player.
std::vector<double> ne_gap(const MatrixGame& game, const Vec& x, const Vec& y);
std::vector<double> ne_gap(const NormalFormGame& game,
                           const std::vector<Vec>& profile);

// Joint distribution over flat profiles induced by independent play.
std::vector<double> product_distribution(const NormalFormGame& game,
                                         const std::vector<Vec>& profile);

// Average of the per-iteration product distributions.
std::vector<double> average_product_distribution(
    const NormalFormGame& game, const std::vector<std::vector<Vec>>& trajectory);

struct EquilibriumGaps {
  double cce = 0.0;
  double ce = 0.0;
};

EquilibriumGaps cce_ce_gap(const std::vector<double>& joint,
                           const NormalFormGame& game);

// max over z' in the domain of <z - z', F(z)>. Needs a constrained domain.
double svi_residual(const VIOperator& op, const Vec& z);

struct WelfareReport {
  double average_welfare = 0.0;
  double robust_poa = 0.0;
  double poa_floor = 0.0;      // robust_poa * OPT
  double regret_slack = 0.0;   // (1 / (1 + mu)) * (1/m) * sum_k regret_k
  double margin = 0.0;         // average_welfare - (poa_floor - regret_slack)
};

double social_welfare(const NormalFormGame& game, const std::vector<Vec>& profile);

// `sum_regrets` is sum_k lambda_k over the trajectory.
WelfareReport welfare_report(const NormalFormGame& game, const SmoothnessMeta& meta,
                             const std::vector<std::vector<Vec>>& trajectory,
                             double sum_regrets);

struct PathLengths {
  double first = 0.0;    // sum_i |x^i - x^{i-1}|^2
  double refined = 0.0;  // sum_i |x^i - xh^i|^2 + |x^i - xh^{i-1}|^2
};

// `primary` holds x^0..x^m. `secondary`, when non-empty, holds xh^0..xh^m.
PathLengths path_lengths(const std::vector<Vec>& primary,
                         const std::vector<Vec>& secondary = {});

// Euclidean projection onto a player's optimal-strategy face of the matrix
// game: {x in simplex : max_j (x^T A)_j <= v} for the minimizer (`row`), or
// {y in simplex : min_i (A y)_i >= v} for the maximizer. Exact active-set
// solve started from the LP equilibrium.
Vec project_optimal_face(const MatrixGame& game, double value, bool row,
                         const Vec& z);

}  // namespace metagames

#endif  // METAGAMES_METRICS_H_
