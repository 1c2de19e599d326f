#ifndef METAGAMES_GAMES_H_
#define METAGAMES_GAMES_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metagames/common.h"
#include "metagames/geometry.h"

namespace metagames {

// Who the stored matrix speaks for. By default the row player x minimizes
// x^T A y (A is x's loss and y's gain). The lower-bound family stores the row
// player's utility instead, so it carries kRowMaximizer.
enum class Orientation { kRowMinimizer, kRowMaximizer };

class MatrixGame {
 public:
  MatrixGame() = default;
  explicit MatrixGame(Mat a, Orientation orientation = Orientation::kRowMinimizer);

  const Mat& a() const { return a_; }
  Orientation orientation() const { return orientation_; }
  int dx() const { return static_cast<int>(a_.rows()); }
  int dy() const { return static_cast<int>(a_.cols()); }

  // Utility vectors fed to each player's learner.
  Vec x_utility(const Vec& y) const;
  Vec y_utility(const Vec& x) const;

  // A in the min-max convention: x minimizes x^T loss_matrix() y.
  Mat loss_matrix() const;

  double value(const Vec& x, const Vec& y) const { return x.dot(a_ * y); }

 private:
  Mat a_;
  Orientation orientation_ = Orientation::kRowMinimizer;
};

// Finite n-player game with one payoff tensor per player, flattened with
// player 0 as the most significant index.
class NormalFormGame {
 public:
  NormalFormGame() = default;
  NormalFormGame(std::vector<int> actions, std::vector<std::vector<double>> payoffs);

  int num_players() const { return static_cast<int>(actions_.size()); }
  const std::vector<int>& actions() const { return actions_; }
  int num_profiles() const { return num_profiles_; }

  int flat_index(const std::vector<int>& profile) const;
  std::vector<int> decode(int flat) const;
  double payoff(int player, int flat) const { return payoffs_[player][flat]; }
  const std::vector<double>& payoff_table(int player) const {
    return payoffs_[player];
  }

  // u_k(a, x_{-k}) for every action a of `player`; own strategy is ignored.
  Vec utility(int player, const std::vector<Vec>& profile) const;
  double expected_payoff(int player, const std::vector<Vec>& profile) const;

 private:
  std::vector<int> actions_;
  std::vector<int> strides_;
  int num_profiles_ = 0;
  std::vector<std::vector<double>> payoffs_;
};

// Potential game whose potential is the multilinear extension of a table over
// pure profiles.
struct PotentialGame {
  NormalFormGame base;
  std::vector<double> potential_table;
  double phi_max = 1.0;

  double potential(const std::vector<Vec>& profile) const;
};

// Identical-interest game: every player receives the potential itself.
PotentialGame identical_interest_game(std::vector<int> actions,
                                      std::vector<double> table);

struct SmoothnessMeta {
  double lambda = 1.0;
  double mu = 1.0;
  std::optional<Vec> alpha_weights;
  double opt_welfare = 0.0;

  double robust_poa() const { return lambda / (1.0 + mu); }
};

struct VIOperator {
  int dim = 0;
  std::function<Vec(const Vec&)> eval;
  std::vector<StrategySet> blocks;  // product domain; empty means unconstrained
  std::optional<double> lipschitz;
  std::optional<double> holder_h;
  std::optional<double> holder_alpha;
  std::optional<double> weak_mvi_rho;
};

Vec project_product(const std::vector<StrategySet>& blocks, const Vec& z);

// F(x, y) = (grad of x's loss, -grad of y's gain) on Delta x Delta.
VIOperator bilinear_operator(const MatrixGame& game);

// Operator (grad_x V, -grad_y V) of V(x, y) = x^T R y / x^T S y.
VIOperator ratio_game_operator(const Mat& r, const Mat& s, double zeta);
double ratio_game_value(const Mat& r, const Mat& s, const Vec& x, const Vec& y);

struct AttackerType {
  Vec covered;
  Vec uncovered;
};

struct SecurityGame {
  int d = 0;
  std::vector<AttackerType> types;
  Vec defender_covered;
  Vec defender_uncovered;

  double attacker_utility(int type, const Vec& coverage, int target) const;
  double defender_utility(const Vec& coverage, int target) const;
};

// u_k(x_{-k}). For a MatrixGame the profile is {x, y}.
Vec utility_gradient(const MatrixGame& game, int player,
                     const std::vector<Vec>& profile);
Vec utility_gradient(const NormalFormGame& game, int player,
                     const std::vector<Vec>& profile);

double spectral_norm(const Mat& a);
double lipschitz_constant(const MatrixGame& game);
double lipschitz_constant(const NormalFormGame& game);

// A_r: row r (1-based) all ones, zeros elsewhere; entries are the row
// player's utility.
MatrixGame lower_bound_family(int d, int r);

MatrixGame matching_pennies();
// Matching pennies with a third action for each player that is strictly worse
// at equilibrium (loss 0.2 for x, gain -0.2 for y), so the equilibrium sits
// away from the barycenter.
MatrixGame matching_pennies_with_outside_option();

enum class GameFamily { kPerturbedBase, kLowerBoundPrior, kPotentialDrift };
enum class Sequencing { kRandom, kSorted, kAlternating };

GameFamily parse_family(const std::string& name);
Sequencing parse_sequencing(const std::string& name);
const char* family_name(GameFamily f);
const char* sequencing_name(Sequencing s);

struct SequenceConfig {
  GameFamily family = GameFamily::kPerturbedBase;
  Sequencing sequencing = Sequencing::kRandom;
  int num_tasks = 1;
  std::uint64_t seed = 0;
  // perturbed-base
  Mat base;
  double delta = 0.0;
  // lower-bound-prior
  Vec prior;
  // potential-drift
  std::vector<int> actions;
  double drift = 0.0;
};

struct GameSequence {
  GameFamily family = GameFamily::kPerturbedBase;
  std::vector<MatrixGame> matrix_games;
  std::vector<PotentialGame> potential_games;
  std::vector<int> rows;  // drawn row per task for the lower-bound family
  std::vector<double> keys;

  int size() const;
};

GameSequence sample_game_sequence(const SequenceConfig& config);

}  // namespace metagames

#endif  // METAGAMES_GAMES_H_
