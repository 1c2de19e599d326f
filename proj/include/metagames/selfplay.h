#ifndef METAGAMES_SELFPLAY_H_
#define METAGAMES_SELFPLAY_H_

#include <functional>
#include <vector>

#include "metagames/common.h"
#include "metagames/games.h"
#include "metagames/learners.h"

namespace metagames {

struct PlayerSpec {
  Regularizer reg = Regularizer::kEuclidean;
  double eta = 0.1;
  PredictionMode mode = PredictionMode::kRecency;
  bool doubling = false;
};

// Utility vector of player k against the profile.
using UtilityFn = std::function<Vec(int, const std::vector<Vec>&)>;

struct SelfPlayOptions {
  int m = 1;
  std::vector<PlayerSpec> players;
  bool record_history = true;
  // Called after every iteration with the 1-based iteration index.
  std::function<void(int, const std::vector<LearnerState>&)> on_step;
};

struct SelfPlayResult {
  std::vector<LearnerState> learners;
  std::vector<Vec> average;  // time-averaged strategies
};

// Every player runs optimistic mirror descent against the others' current
// strategies. The first prediction is the utility at the initial profile.
SelfPlayResult self_play(const std::vector<StrategySet>& sets, const UtilityFn& utility,
                         const std::vector<Vec>& inits, const SelfPlayOptions& options);

SelfPlayResult self_play(const MatrixGame& game, const std::vector<Vec>& inits,
                         const SelfPlayOptions& options);

SelfPlayResult self_play(const NormalFormGame& game, const std::vector<Vec>& inits,
                         const SelfPlayOptions& options);

}  // namespace metagames

#endif  // METAGAMES_SELFPLAY_H_
