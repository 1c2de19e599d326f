#ifndef METAGAMES_LEARNERS_H_
#define METAGAMES_LEARNERS_H_

#include <optional>
#include <string>
#include <vector>

#include "metagames/common.h"
#include "metagames/games.h"
#include "metagames/geometry.h"

namespace metagames {

// How the next prediction m^{(i+1)} is formed after observing u^{(i)}.
//   kRecency          m^{(i+1)} = u^{(i)}
//   kZero             m^{(i+1)} = 0 (plain mirror descent)
//   kSecondaryAnchor  caller supplies the utility at the opponents' secondary
//                     iterates via set_prediction
//   kAlternating      caller supplies the utility at the opponents' current
//                     strategy via set_prediction
enum class PredictionMode { kRecency, kZero, kSecondaryAnchor, kAlternating };

const char* prediction_mode_name(PredictionMode mode);
PredictionMode parse_prediction_mode(const std::string& name);

// Optimistic mirror descent learner. `primary` is x^{(i)}, the strategy to be
// played next; `secondary` is xh^{(i-1)}, the anchor of both prox steps.
struct LearnerState {
  StrategySet set;
  Regularizer reg = Regularizer::kEuclidean;
  double eta = 0.1;
  PredictionMode mode = PredictionMode::kRecency;
  bool doubling = false;
  bool record_history = true;

  Vec init;
  Vec primary;
  Vec secondary;
  Vec prediction;
  Vec last_play;  // x^{(i-1)}, equal to init before the first step

  // Per-step history: plays[i] = x^{(i+1)}, secondaries[i] = xh^{(i)}.
  std::vector<Vec> plays;
  std::vector<Vec> utilities;
  std::vector<Vec> predictions;
  std::vector<Vec> secondaries;
  std::vector<double> etas;

  // Running sums, so that regret and RVU terms are O(d) at any time.
  int steps = 0;
  Vec cum_utility;
  double cum_value = 0.0;
  double sum_pred_err2 = 0.0;   // sum |u - m|_*^2
  double sum_path2 = 0.0;       // sum |x^i - x^{i-1}|^2 with x^0 = init
  double sum_refined2 = 0.0;    // sum |x^i - xh^i|^2 + |x^i - xh^{i-1}|^2
  // Squared norms above use the regularizer's primal norm (l1 for entropic,
  // l2 otherwise).
  // Doubling-trick bookkeeping: the local RVU residual
  // eta * sum|u - m|^2 - (1/(8 eta)) sum|x^i - x^{i-1}|^2 since the last halving.
  int eta_halvings = 0;
  double epoch_pred_err2 = 0.0;
  double epoch_path2 = 0.0;
};

LearnerState make_learner(const StrategySet& set, Regularizer reg, double eta,
                          const Vec& init, const Vec& first_prediction,
                          PredictionMode mode = PredictionMode::kRecency);

// Record u^{(i)} against the current primary, advance the secondary, and form
// the next primary from the mode's prediction.
void omd_step(LearnerState& state, const Vec& utility);

// Replace m^{(i)} for the upcoming play and recompute the primary.
void set_prediction(LearnerState& state, const Vec& prediction);

// Squared primal and dual norms matching the regularizer's strong-convexity
// norm.
double primal_norm2(Regularizer reg, const Vec& v);
double dual_norm2(Regularizer reg, const Vec& v);

struct RegretResult {
  double value = 0.0;
  Vec comparator;  // optimum in hindsight
};

// argmax over the set of <x, cum>; lowest index wins ties on the simplex.
Vec optimum_in_hindsight(const StrategySet& set, const Vec& cum);

RegretResult external_regret(const StrategySet& set, const std::vector<Vec>& plays,
                             const std::vector<Vec>& utilities,
                             const std::optional<Vec>& comparator = std::nullopt);
RegretResult external_regret(const LearnerState& state,
                             const std::optional<Vec>& comparator = std::nullopt);

enum class AlphaSchedule { kUniform, kLinear, kQuadratic, kCustom };

struct AlphaWeights {
  AlphaSchedule schedule = AlphaSchedule::kUniform;
  Vec values;
};

AlphaWeights make_alpha_weights(AlphaSchedule schedule, int m,
                                const Vec& custom = Vec());

RegretResult alpha_regret(const StrategySet& set, const std::vector<Vec>& plays,
                          const std::vector<Vec>& utilities,
                          const AlphaWeights& weights);

// Right-hand side of the initialization-dependent RVU bound at `comparator`.
//   kStandard: (1/eta) D(x||x0) + eta sum|u-m|^2 - (1/(8 eta)) sum|x^i-x^{i-1}|^2
//   kRefined:  (1/eta) D(x||x0) + eta sum|u-m|^2
//              - (1/(2 eta)) sum (|x^i-xh^i|^2 + |x^i-xh^{i-1}|^2)
enum class RvuStrength { kStandard, kRefined };
double rvu_bound(const LearnerState& state, const Vec& comparator,
                 RvuStrength strength);

// Weighted RVU right-hand side for alpha regret at `comparator`. Needs the
// full history.
double weighted_rvu_bound(const LearnerState& state, const AlphaWeights& weights,
                          const Vec& comparator);

// Projected gradient ascent x' = proj(x + eta u).
Vec gd_step(const StrategySet& set, const Vec& x, const Vec& utility, double eta);

// Multiplicative weights on losses: x'_j proportional to x_j exp(-eta l_j).
Vec mwu_step(const Vec& dist, const Vec& losses, double eta);

// Extra-gradient on a variational inequality with utility -F.
struct EgState {
  std::vector<StrategySet> blocks;
  Regularizer reg = Regularizer::kEuclidean;
  double eta = 0.1;
  Vec init;
  Vec current;         // x^{(i-1)}
  Vec last_utility;    // u^{(i-1)} = -F(x^{(i-1)})
  std::vector<Vec> primaries;    // x^{(0..i)}
  std::vector<Vec> secondaries;  // xh^{(1..i)}
  std::vector<Vec> aux_utilities;  // uh^{(1..i)}
  std::vector<Vec> utilities;      // u^{(0..i)}
};

EgState make_eg(const VIOperator& op, Regularizer reg, double eta, const Vec& init);
void eg_step(EgState& state, const VIOperator& op);

// Proxy regret sum_i <x - xh^i, uh^i>, maximized over the domain unless a
// comparator is given.
RegretResult eg_proxy_regret(const EgState& state,
                             const std::optional<Vec>& comparator = std::nullopt);
double eg_rvu_bound(const EgState& state, const Vec& comparator);

// Optimistic AdaGrad with diagonal preconditioners on the simplex or a box.
struct AdaGradState {
  StrategySet set;
  Vec init;
  Vec secondary;
  Vec prediction;
  std::vector<Vec> plays;
  std::vector<Vec> secondaries;  // xh^{(0..i)}
  std::vector<Vec> utilities;
  std::vector<Vec> predictions;
  std::vector<Vec> preconditioners;  // diag Q^{(i)}
};

AdaGradState make_adagrad(const StrategySet& set, const Vec& first_prediction);
// x^{(i)} = proj_Q(xh^{(i-1)} + Q^{-1} m^{(i)}) with Q = diag(q_diag).
Vec adagrad_play(AdaGradState& state, const Vec& q_diag);
// xh^{(i)} = proj_Q(xh^{(i-1)} + Q^{-1} u^{(i)}) with the Q of the last play.
void adagrad_update(AdaGradState& state, const Vec& utility,
                    const Vec& next_prediction);
// adagrad_play followed by adagrad_update. Returns x^{(i)}.
Vec optadagrad_step(AdaGradState& state, const Vec& q_diag, const Vec& utility,
                    const Vec& next_prediction);
// Preconditioned prox: argmin_x |x - y|_Q^2 over the set.
Vec project_preconditioned(const StrategySet& set, const Vec& y, const Vec& q_diag);
double adagrad_drift(const AdaGradState& state);  // sum |Q^{i+1} - Q^i|_2
double adagrad_bound(const AdaGradState& state, const Vec& comparator);

}  // namespace metagames

#endif  // METAGAMES_LEARNERS_H_
