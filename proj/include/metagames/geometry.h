#ifndef METAGAMES_GEOMETRY_H_
#define METAGAMES_GEOMETRY_H_

#include <variant>

#include "metagames/common.h"

namespace metagames {

// Probability simplex over `dim` actions.
struct Simplex {
  int dim = 1;
};

// Axis-aligned box [lower, upper].
struct Box {
  Vec lower;
  Vec upper;
};

using StrategySet = std::variant<Simplex, Box>;

enum class Regularizer { kEuclidean, kEntropic, kLogBarrier };

const char* regularizer_name(Regularizer reg);
Regularizer parse_regularizer(const std::string& name);

int set_dim(const StrategySet& set);

// Minimizer of the regularizer over the set: the barycenter of the simplex or
// the midpoint of the box.
Vec set_center(const StrategySet& set);

// l2-diameter. sqrt(2) for any simplex with at least two actions.
double set_diameter(const StrategySet& set);

bool is_feasible(const StrategySet& set, const Vec& x, double tol = 1e-9);

Vec project_l2(const Simplex& set, const Vec& y);
Vec project_l2(const Box& set, const Vec& y);
Vec project_l2(const StrategySet& set, const Vec& y);

// argmin over the simplex of sum_j q_j (x_j - y_j)^2 for positive weights q.
// Used by the diagonal-preconditioner variant of optimistic AdaGrad.
Vec project_weighted_simplex(const Vec& y, const Vec& q);

// D(x || xp). Euclidean: 0.5 |x - xp|^2. Entropic: KL(x || xp).
// Log-barrier: sum_j x_j / xp_j - log(x_j / xp_j) - 1.
double bregman(Regularizer reg, const Vec& x, const Vec& xp);

// argmax_x <x, g> - (1/eta) D(x || anchor) over the set.
Vec prox_step(Regularizer reg, const StrategySet& set, const Vec& anchor,
              const Vec& g, double eta);

// Lifts coordinates below 1e-15 and renormalizes.
Vec interior_safeguard(const Vec& x);

}  // namespace metagames

#endif  // METAGAMES_GEOMETRY_H_
