#ifndef METAGAMES_SWAPREGRET_H_
#define METAGAMES_SWAPREGRET_H_

#include <vector>

#include "metagames/common.h"
#include "metagames/learners.h"

namespace metagames {

// Blum-Mansour reduction: one log-barrier OMD learner per action. Row a of
// `transition` is learner a's current strategy and `mix` is a stationary
// distribution of that chain.
struct SwapWrapper {
  int d = 1;
  std::vector<LearnerState> learners;
  Mat transition;
  Vec mix;
  std::vector<Vec> plays;
  std::vector<Vec> utilities;
  double max_stationary_residual = 0.0;
};

// Stationary distribution of a row-stochastic matrix: power iteration on the
// lazy chain (I + Q)/2 from uniform, with a direct solve as fallback.
Vec stationary_distribution(const Mat& q);

// l1 residual |pi Q - pi|_1.
double stationary_residual(const Mat& q, const Vec& pi);

// `inits`, when given, holds one interior starting point per action.
SwapWrapper make_swap_wrapper(int d, double eta,
                              const std::vector<Vec>& inits = {});

// Feeds x[a] * u to learner a, then rebuilds the chain and the mix.
void swap_step(SwapWrapper& wrapper, const Vec& utility);

// Default log-barrier learning rate 1 / (64 n d L).
double default_swap_eta(int num_players, int d, double lipschitz);

// max over swap maps phi of sum_i <phi(x^i) - x^i, u^i>. Swap maps act on
// each source action independently, so the maximum is the sum over source
// actions of the best target.
double swap_regret(const std::vector<Vec>& plays, const std::vector<Vec>& utilities);

// Same quantity by enumerating all d^d maps; d <= 6.
double swap_regret_enumerate(const std::vector<Vec>& plays,
                             const std::vector<Vec>& utilities);

// Per-action external regrets summed, each measured against the comparator
// (1 - alpha) * optimum + alpha * uniform.
double per_action_regret_sum(const SwapWrapper& wrapper, double alpha = 0.0);

// (1/eta) sum_a D(x~_a || x_a^0) with the same offset comparators. Infinite
// when alpha = 0, since the log-barrier divergence blows up at vertices.
double swap_rvu_rhs(const SwapWrapper& wrapper, double alpha);

// Boundary offset per the meta-learning analysis: (m T)^(-1/3).
double swap_offset_alpha(int m, int num_tasks);

}  // namespace metagames

#endif  // METAGAMES_SWAPREGRET_H_
