#ifndef METAGAMES_META_H_
#define METAGAMES_META_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metagames/common.h"
#include "metagames/games.h"
#include "metagames/geometry.h"

namespace metagames {

enum class InitMode {
  kCold,
  kFtlAverage,
  kLastIterate,
  kPrevOptimum,
  kNeAverage,
  kCustomAnchor,
};

const char* init_mode_name(InitMode mode);
InitMode parse_init_mode(const std::string& name);

// What a finished task hands to the initializer, one entry per player.
// Modes only read the field they need.
struct TaskOutcome {
  std::vector<Vec> optima;
  std::vector<Vec> last_iterates;
  std::vector<Vec> equilibria;
};

struct Initializer {
  InitMode mode = InitMode::kCold;
  std::vector<StrategySet> sets;
  std::vector<Vec> custom;
  std::vector<Vec> sums;      // running sums for the averaging modes
  std::vector<Vec> previous;  // last anchor for the verbatim modes
  int count = 0;
};

Initializer make_initializer(InitMode mode, const std::vector<StrategySet>& sets,
                             const std::vector<Vec>& custom = {});

// Initialization for the upcoming task.
std::vector<Vec> current_initialization(const Initializer& init);

// Absorb a finished task and return the next initialization.
std::vector<Vec> next_initialization(Initializer& init, const TaskOutcome& outcome);

// (1 - alpha) x + alpha * uniform.
Vec offset_toward_uniform(const Vec& x, double alpha);

// Exponentially weighted online optimization over a learning-rate interval
// [lo, hi]. Task s contributes the loss gamma_s (eta + (B_s^2 + eps^2) / eta).
struct EwooState {
  double lo = 0.0;
  double hi = 1.0;
  double beta = 1.0;
  double eps2 = 0.0;
  double d = 1.0;  // the bound D on B_s, kept for the regret bound
  std::vector<double> b2;
  std::vector<double> gamma;
};

// Interval [rho D, sqrt(D^2 + rho^2 D^2)], eps = rho D and, unless given,
// beta = (2 / D) min{1, rho^2 / D^2}.
EwooState make_ewoo(double d, double rho, std::optional<double> beta = std::nullopt);

// Direct construction over an explicit interval.
EwooState make_ewoo_interval(double lo, double hi, double beta, double eps2 = 0.0);

void ewoo_observe(EwooState& state, double b2, double gamma);

// Cumulative regularized loss sum_s gamma_s (eta + (B_s^2 + eps^2) / eta).
double ewoo_cumulative_loss(const EwooState& state, double eta);

// Unregularized task loss gamma (eta + B^2 / eta).
double ewoo_task_loss(double b2, double gamma, double eta);

// Posterior mean of eta under exp(-beta * cumulative loss), by adaptive
// Simpson quadrature to relative error 1e-8.
double ewoo_next_eta(const EwooState& state);

// Right-hand side of the eps-EWOO regret bound against comparator eta_star:
// min{eps^2/eta_star, eps} sum gamma + (D gamma_max / 2) max{D^2/eps^2, 1}
// (1 + log(T + 1)).
double ewoo_regret_bound(const EwooState& state, double eta_star);

// Adaptive Simpson on [a, b]; throws NumericError if the recursion budget
// runs out before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 48);

struct SimilarityStats {
  std::vector<double> v_opt2;  // per player
  double v_ne2_worst = 0.0;
  double v_ne2_best = 0.0;
  double v_diff = 0.0;
  std::vector<double> v_kl;    // per player
  double entropy = 0.0;
};

// (1/T) sum_t |a_t - mean|^2, the minimum of (1/T) sum_t |a_t - x|^2.
double task_variance(const std::vector<Vec>& anchors);

// (1/T) sum_t KL(a_t || mean).
double kl_similarity(const std::vector<Vec>& anchors);

// Shannon entropy with natural log and 0 log 0 = 0.
double entropy(const Vec& p);

// max_x Phi(x) - Phi'(x). Both potentials are multilinear, so the maximum is
// attained at a pure profile and the enumeration is exact.
double potential_difference(const PotentialGame& a, const PotentialGame& b);

// (1/T) sum_{t < T} Delta(Phi_t, Phi_{t+1}).
double v_diff(const std::vector<PotentialGame>& games);

// Equilibrium variance with the given per-task selections (the worst case
// when the selections are adversarial or unique).
double ne_variance(const std::vector<Vec>& equilibria);

// (1/T) min_z sum_t dist(z, Z*_t)^2 over the joint strategy z = (x, y),
// using projections onto each game's optimal faces.
struct BestNeResult {
  double value = 0.0;
  Vec center;
  int iterations = 0;
};
BestNeResult ne_variance_best(const std::vector<MatrixGame>& games,
                              const std::vector<double>& values,
                              int max_iterations = 500, double tol = 1e-10);

}  // namespace metagames

#endif  // METAGAMES_META_H_
