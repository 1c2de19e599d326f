#ifndef METAGAMES_HOLDER_VI_H_
#define METAGAMES_HOLDER_VI_H_

#include <optional>
#include <vector>

#include "metagames/common.h"
#include "metagames/games.h"

namespace metagames {

struct HolderSchedule {
  double h = 1.0;
  double alpha = 1.0;
  double radius_bound = 1.0;  // bound on |z* - z0|_2
  int horizon = 1;
};

// g(alpha) = (1 + alpha) (2 + 2 alpha)^((1 - alpha) / (1 + alpha)).
double holder_g(double alpha);

// eta(m) = (r^2 / (m H^(2/(1-alpha)) g(alpha)))^((1-alpha)/2) for alpha < 1,
// and the Lipschitz rate 1/(4H) at alpha = 1.
double holder_eta(const HolderSchedule& schedule);

enum class VIPrediction {
  kSecondary,  // m^i = F(zh^{i-1})
  kRecency,    // m^i = F(z^{i-1})
};

struct VIRun {
  std::vector<Vec> primaries;    // z^0 .. z^m, z^0 = init
  std::vector<Vec> secondaries;  // zh^0 .. zh^m, zh^0 = init
  double refined_path = 0.0;     // sum_i |z^i - zh^i|^2 + |z^i - zh^{i-1}|^2
  double best_residual = 0.0;    // min_i SVI residual (or |F| when unconstrained)
  int best_index = 0;
};

// Optimistic gradient on the VI with operator F over the operator's product
// domain (unconstrained when it has no blocks).
VIRun run_ogd_vi(const VIOperator& op, const Vec& init, int m, double eta,
                 VIPrediction prediction = VIPrediction::kSecondary);

struct WeakMviResult {
  std::vector<Vec> trajectory;  // z^0 .. z^m
  std::vector<double> norms;    // |F(z^i)|_2
  int min_index = 0;            // argmin over i = 1 .. m-1 (0 when m < 2)
  double min_norm = 0.0;
  double lhs = 0.0;             // sum_{i=1}^{m-1} |F(z^i)|^2
  double rhs = 0.0;
  double per_iterate_bound = 0.0;  // sqrt(rhs / (m - 1))
  double slack = 0.0;           // rhs - lhs
};

// Unconstrained OGD z^i = zh^{i-1} - eta F(z^{i-1}), zh^i = zh^{i-1} - eta F(z^i)
// with the bound
//   sum_{i<m} |F(z^i)|^2 <= 2/(eta (eta - 2 rho)) |z* - z0|^2
//                           + 2 rho/(eta - 2 rho) |F(z^m)|^2.
// Requires 2 rho < eta < 1/(4L).
WeakMviResult weak_mvi_run(const VIOperator& op, double rho, double lipschitz,
                           const Vec& z0, const Vec& z_star, int m, double eta);

// F(z) = H sign(z - c) |z - c|^alpha componentwise on the box [lo, hi]^d.
VIOperator sign_power_operator(int dim, double h, double alpha, const Vec& center,
                               double lo, double hi);

// Upper bound on the Hoelder constant of sign_power_operator:
// H 2^(1-alpha) d^((1-alpha)/2).
double sign_power_holder_constant(int dim, double h, double alpha);

// Largest observed |F(z) - F(z')| / |z - z'|^alpha over random pairs in the
// box [lo, hi]^d.
double estimate_holder_constant(const VIOperator& op, double alpha, double lo, double hi,
                                int samples, std::uint64_t seed);

// F(z) = scale R (z - c) with R the quarter-turn rotation on each coordinate
// pair. Monotone, so weak MVI holds for every rho >= 0, and scale-Lipschitz.
VIOperator rotation_operator(int pairs, double scale, const Vec& center,
                             std::optional<double> box_radius = std::nullopt);

// Rotation of modulus min(L, 2L / sqrt(horizon)) inside a box of the given
// radius. At eta = 1/(4L) optimistic gradient is still turning after
// `horizon` steps, so the best residual it reaches is of order
// horizon^(-1/2): the family attains the Lipschitz-case rate.
VIOperator horizon_rotation_operator(int horizon, double lipschitz, const Vec& center,
                                     double box_radius);

// Rotation plus a contraction toward `center` with weight -gamma:
// F(z) = scale (R - gamma I)(z - c). For gamma > 0 it is not monotone but
// satisfies the weak MVI property with rho = 2 gamma / (scale (1 + gamma^2)).
VIOperator damped_rotation_operator(double scale, double gamma, const Vec& center);
double damped_rotation_rho(double scale, double gamma);

}  // namespace metagames

#endif  // METAGAMES_HOLDER_VI_H_
