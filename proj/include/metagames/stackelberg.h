#ifndef METAGAMES_STACKELBERG_H_
#define METAGAMES_STACKELBERG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "metagames/common.h"
#include "metagames/games.h"

namespace metagames {

enum class PointProvenance { kUser, kBruteForceRegions, kGrid };

const char* provenance_name(PointProvenance p);

struct ExtremePointSet {
  std::vector<Vec> points;
  PointProvenance provenance = PointProvenance::kUser;
  double gamma = 0.0;

  int size() const { return static_cast<int>(points.size()); }
};

// Validates feasibility of every point on the d-simplex.
ExtremePointSet make_point_set(int d, std::vector<Vec> points);

// Attacker target under `coverage`: highest attacker utility, ties broken in
// the defender's favor and then by lowest index. Utilities within 1e-12 count
// as tied.
int best_response(const SecurityGame& game, int type, const Vec& coverage);

// Defender utility when the attacker of `type` best-responds to `coverage`.
double commitment_value(const SecurityGame& game, int type, const Vec& coverage);

// Vertices of every best-response region of the game, one region per tuple of
// targets across attacker types. Enumerates all (d-1)-subsets of the
// indifference and nonnegativity hyperplanes; d must be at most 5.
ExtremePointSet brute_force_extreme_points(const SecurityGame& game);

// Grid of the simplex with spacing 1/ceil(1/gamma).
ExtremePointSet grid_points(int d, double gamma);

// brute_force_extreme_points when d <= 5, grid_points otherwise.
ExtremePointSet build_extreme_points(const SecurityGame& game, double gamma);

// max_{x in E} sum_i [u(x, b_{f_i}(x)) - u(x_i, b_{f_i}(x_i))].
double stackelberg_regret(const SecurityGame& game, const std::vector<Vec>& played,
                          const std::vector<int>& types, const ExtremePointSet& points);

// Utility vector over E for one round: entry e is the defender utility at
// point e when the attacker of `type` best-responds to it.
Vec point_utilities(const SecurityGame& game, int type, const ExtremePointSet& points);

void validate_security_game(const SecurityGame& game);

struct AttackerScript {
  std::vector<std::vector<int>> types;  // [task][round]
};

// Each round draws a type uniformly from `allowed`.
AttackerScript random_attackers(int num_tasks, int rounds, const std::vector<int>& allowed,
                                std::uint64_t seed);

struct StackelbergConfig {
  int rounds = 100;
  bool meta = true;           // FTL initialization and EWOO learning rate
  double eta = 0.0;           // fixed rate when meta is off; 0 means sqrt(ln|E| / m)
  double alpha = -1.0;        // offset; negative means 1/sqrt(mT)
  std::uint64_t seed = 0;
};

struct StackelbergTaskRecord {
  int task = 0;
  double eta = 0.0;
  double expected_regret = 0.0;
  double realized_regret = 0.0;
  double bound = 0.0;          // eta m + KL(offset optimum || init)/eta + 2 alpha m
  double init_entropy = 0.0;
  double init_mass_on_best = 0.0;
  int best_point = 0;
};

struct StackelbergRun {
  std::vector<StackelbergTaskRecord> tasks;
  double alpha = 0.0;
  int num_points = 0;
  Vec mean_optimum;            // FTL mean of one-hot optima over E
  double worst_constant = 0.0; // max_t expected regret / sqrt(m ln|E|)
};

StackelbergRun run_meta_stackelberg(const std::vector<SecurityGame>& games,
                                    const AttackerScript& script,
                                    const ExtremePointSet& points,
                                    const StackelbergConfig& config);

}  // namespace metagames

#endif  // METAGAMES_STACKELBERG_H_
