#include "metagames/selfplay.h"

namespace metagames {

namespace {

std::vector<Vec> others_profile(const std::vector<LearnerState>& learners, bool secondaries) {
  std::vector<Vec> profile;
  profile.reserve(learners.size());
  for (const auto& l : learners) profile.push_back(secondaries ? l.secondary : l.primary);
  return profile;
}

}  // namespace

SelfPlayResult self_play(const std::vector<StrategySet>& sets, const UtilityFn& utility,
                         const std::vector<Vec>& inits, const SelfPlayOptions& options) {
  const std::size_t n = sets.size();
  if (n == 0) throw ConfigError("self_play: no players");
  if (inits.size() != n) throw ConfigError("self_play: one initialization per player");
  if (options.players.size() != n && options.players.size() != 1) {
    throw ConfigError("self_play: player specs must be one shared spec or one per player");
  }
  if (options.m < 1) throw ConfigError("self_play: m must be >= 1");

  SelfPlayResult res;
  for (std::size_t k = 0; k < n; ++k) {
    const PlayerSpec& spec = options.players.size() == 1 ? options.players[0] : options.players[k];
    const Vec first = spec.mode == PredictionMode::kZero
                          ? Vec(Vec::Zero(set_dim(sets[k])))
                          : utility(static_cast<int>(k), inits);
    LearnerState s = make_learner(sets[k], spec.reg, spec.eta, inits[k], first, spec.mode);
    s.doubling = spec.doubling;
    s.record_history = options.record_history;
    res.learners.push_back(std::move(s));
    res.average.push_back(Vec::Zero(set_dim(sets[k])));
  }

  std::vector<Vec> utils(n);
  for (int i = 1; i <= options.m; ++i) {
    const std::vector<Vec> profile = others_profile(res.learners, false);
    for (std::size_t k = 0; k < n; ++k) {
      utils[k] = utility(static_cast<int>(k), profile);
      res.average[k] += profile[k];
    }
    for (std::size_t k = 0; k < n; ++k) omd_step(res.learners[k], utils[k]);
    for (std::size_t k = 0; k < n; ++k) {
      auto& l = res.learners[k];
      if (l.mode == PredictionMode::kSecondaryAnchor) {
        set_prediction(l, utility(static_cast<int>(k), others_profile(res.learners, true)));
      } else if (l.mode == PredictionMode::kAlternating) {
        set_prediction(l, utility(static_cast<int>(k), others_profile(res.learners, false)));
      }
    }
    if (options.on_step) options.on_step(i, res.learners);
  }
  for (auto& a : res.average) a /= static_cast<double>(options.m);
  return res;
}

SelfPlayResult self_play(const MatrixGame& game, const std::vector<Vec>& inits,
                         const SelfPlayOptions& options) {
  const std::vector<StrategySet> sets{Simplex{game.dx()}, Simplex{game.dy()}};
  return self_play(
      sets,
      [&game](int k, const std::vector<Vec>& p) { return utility_gradient(game, k, p); },
      inits, options);
}

SelfPlayResult self_play(const NormalFormGame& game, const std::vector<Vec>& inits,
                         const SelfPlayOptions& options) {
  std::vector<StrategySet> sets;
  for (int a : game.actions()) sets.push_back(Simplex{a});
  return self_play(
      sets,
      [&game](int k, const std::vector<Vec>& p) { return utility_gradient(game, k, p); },
      inits, options);
}

}  // namespace metagames
