#include "metagames/meta.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metagames/metrics.h"

namespace metagames {

namespace {

struct SimpsonCtx {
  const std::function<double(double)>* f;
  double tol;
  bool exhausted = false;
};

double simpson_recurse(SimpsonCtx& ctx, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*ctx.f)(lm);
  const double frm = (*ctx.f)(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    ctx.exhausted = true;
    return left + right + delta / 15.0;
  }
  return simpson_recurse(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

void check_anchors(const std::vector<Vec>& anchors, const char* who) {
  if (anchors.empty()) throw InvalidInputError(std::string(who) + ": no anchors");
  for (const auto& a : anchors) {
    if (a.size() != anchors[0].size()) {
      throw InvalidInputError(std::string(who) + ": anchors differ in dimension");
    }
  }
}

}  // namespace

const char* init_mode_name(InitMode mode) {
  switch (mode) {
    case InitMode::kCold: return "cold";
    case InitMode::kFtlAverage: return "ftl-average";
    case InitMode::kLastIterate: return "last-iterate";
    case InitMode::kPrevOptimum: return "prev-optimum";
    case InitMode::kNeAverage: return "ne-average";
    case InitMode::kCustomAnchor: return "custom-anchor";
  }
  return "unknown";
}

InitMode parse_init_mode(const std::string& name) {
  for (InitMode m : {InitMode::kCold, InitMode::kFtlAverage, InitMode::kLastIterate,
                     InitMode::kPrevOptimum, InitMode::kNeAverage, InitMode::kCustomAnchor}) {
    if (name == init_mode_name(m)) return m;
  }
  throw ConfigError("unknown init mode '" + name + "'");
}

Initializer make_initializer(InitMode mode, const std::vector<StrategySet>& sets,
                             const std::vector<Vec>& custom) {
  if (sets.empty()) throw ConfigError("initializer: no players");
  Initializer init;
  init.mode = mode;
  init.sets = sets;
  if (mode == InitMode::kCustomAnchor) {
    if (custom.size() != sets.size()) {
      throw ConfigError("initializer: custom-anchor needs one anchor per player");
    }
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (!is_feasible(sets[k], custom[k])) {
        throw ConfigError("initializer: custom anchor " + std::to_string(k) + " is infeasible");
      }
    }
    init.custom = custom;
  }
  for (const auto& s : sets) {
    init.sums.push_back(Vec::Zero(set_dim(s)));
    init.previous.push_back(set_center(s));
  }
  return init;
}

std::vector<Vec> current_initialization(const Initializer& init) {
  std::vector<Vec> out;
  for (std::size_t k = 0; k < init.sets.size(); ++k) {
    switch (init.mode) {
      case InitMode::kCold:
        out.push_back(set_center(init.sets[k]));
        break;
      case InitMode::kCustomAnchor:
        out.push_back(init.custom[k]);
        break;
      case InitMode::kFtlAverage:
      case InitMode::kNeAverage:
        out.push_back(init.count == 0 ? set_center(init.sets[k])
                                      : Vec(init.sums[k] / init.count));
        break;
      case InitMode::kLastIterate:
      case InitMode::kPrevOptimum:
        out.push_back(init.previous[k]);
        break;
    }
  }
  return out;
}

std::vector<Vec> next_initialization(Initializer& init, const TaskOutcome& outcome) {
  const std::size_t n = init.sets.size();
  const std::vector<Vec>* source = nullptr;
  switch (init.mode) {
    case InitMode::kFtlAverage:
    case InitMode::kPrevOptimum:
      source = &outcome.optima;
      break;
    case InitMode::kLastIterate:
      source = &outcome.last_iterates;
      break;
    case InitMode::kNeAverage:
      source = &outcome.equilibria;
      if (source->size() != n) {
        throw ConfigError("ne-average initialization needs equilibria for every task");
      }
      break;
    case InitMode::kCold:
    case InitMode::kCustomAnchor:
      break;
  }
  if (source != nullptr) {
    if (source->size() != n) {
      throw InvalidInputError(std::string("initializer: outcome for mode ") +
                              init_mode_name(init.mode) + " has wrong player count");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if ((*source)[k].size() != init.sums[k].size()) {
        throw InvalidInputError("initializer: outcome has wrong dimension");
      }
      init.sums[k] += (*source)[k];
      init.previous[k] = (*source)[k];
    }
  }
  ++init.count;
  return current_initialization(init);
}

Vec offset_toward_uniform(const Vec& x, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("offset: alpha must lie in [0, 1]");
  const auto d = x.size();
  return (1.0 - alpha) * x + Vec::Constant(d, alpha / static_cast<double>(d));
}

EwooState make_ewoo(double d, double rho, std::optional<double> beta) {
  if (!(d > 0.0) || !(rho > 0.0)) throw ConfigError("ewoo: D and rho must be positive");
  EwooState s;
  s.d = d;
  s.lo = rho * d;
  s.hi = std::sqrt(d * d + rho * rho * d * d);
  s.eps2 = rho * rho * d * d;
  s.beta = beta.value_or((2.0 / d) * std::min(1.0, rho * rho / (d * d)));
  return s;
}

EwooState make_ewoo_interval(double lo, double hi, double beta, double eps2) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("ewoo: need 0 < lo < hi");
  if (!(beta > 0.0)) throw ConfigError("ewoo: beta must be positive");
  EwooState s;
  s.lo = lo;
  s.hi = hi;
  s.beta = beta;
  s.eps2 = eps2;
  s.d = std::sqrt(std::max(hi * hi - eps2, 0.0));
  return s;
}

void ewoo_observe(EwooState& state, double b2, double gamma) {
  if (!std::isfinite(b2) || b2 < 0.0 || !std::isfinite(gamma) || gamma < 0.0) {
    throw NumericError("ewoo: observations must be finite and nonnegative");
  }
  state.b2.push_back(b2);
  state.gamma.push_back(gamma);
}

double ewoo_cumulative_loss(const EwooState& state, double eta) {
  double total = 0.0;
  for (std::size_t s = 0; s < state.b2.size(); ++s) {
    total += state.gamma[s] * (eta + (state.b2[s] + state.eps2) / eta);
  }
  return total;
}

double ewoo_task_loss(double b2, double gamma, double eta) {
  return gamma * (eta + b2 / eta);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  const int pieces = 64;
  const double h = (b - a) / pieces;
  SimpsonCtx ctx{&f, rel_tol};
  // A coarse pass sets the absolute tolerance scale.
  double coarse = 0.0;
  std::vector<double> fx(2 * pieces + 1);
  for (int i = 0; i <= 2 * pieces; ++i) fx[i] = f(a + 0.5 * h * i);
  for (int i = 0; i < pieces; ++i) {
    coarse += h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
  }
  const double abs_tol = std::max(std::abs(coarse) * rel_tol, 1e-300) / pieces;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + h * i;
    const double whole = h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
    total += simpson_recurse(ctx, lo, lo + h, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2], whole,
                             abs_tol, max_depth);
  }
  if (ctx.exhausted) throw NumericError("adaptive_simpson: depth budget exhausted");
  return total;
}

double ewoo_next_eta(const EwooState& state) {
  if (state.b2.empty()) return 0.5 * (state.lo + state.hi);
  double sg = 0.0;
  double sc = 0.0;
  for (std::size_t s = 0; s < state.b2.size(); ++s) {
    sg += state.gamma[s];
    sc += state.gamma[s] * (state.b2[s] + state.eps2);
  }
  if (sg == 0.0 && sc == 0.0) return 0.5 * (state.lo + state.hi);
  double star = sg > 0.0 ? std::sqrt(sc / sg) : state.hi;
  star = std::clamp(star, state.lo, state.hi);
  const double floor = ewoo_cumulative_loss(state, star);
  const double beta = state.beta;
  auto weight = [&](double eta) {
    return std::exp(-beta * (ewoo_cumulative_loss(state, eta) - floor));
  };
  const double mass = adaptive_simpson(weight, state.lo, state.hi, 1e-8);
  const double moment =
      adaptive_simpson([&](double eta) { return eta * weight(eta); }, state.lo, state.hi, 1e-8);
  if (!(mass > 0.0) || !std::isfinite(moment)) {
    throw NumericError("ewoo: posterior mass vanished");
  }
  return std::clamp(moment / mass, state.lo, state.hi);
}

double ewoo_regret_bound(const EwooState& state, double eta_star) {
  if (!(eta_star > 0.0)) throw ConfigError("ewoo bound: eta_star must be positive");
  const double eps = std::sqrt(state.eps2);
  double sg = 0.0;
  double gmax = 0.0;
  for (double g : state.gamma) {
    sg += g;
    gmax = std::max(gmax, g);
  }
  const double t = static_cast<double>(state.gamma.size());
  const double ratio = state.eps2 > 0.0 ? state.d * state.d / state.eps2
                                        : std::numeric_limits<double>::infinity();
  return std::min(state.eps2 / eta_star, eps) * sg +
         0.5 * state.d * gmax * std::max(ratio, 1.0) * (1.0 + std::log(t + 1.0));
}

namespace {

// Mean as an offset from the first anchor, so identical anchors reproduce it
// exactly.
Vec anchor_mean(const std::vector<Vec>& anchors) {
  Vec offset = Vec::Zero(anchors[0].size());
  for (const auto& a : anchors) offset += a - anchors[0];
  return anchors[0] + offset / static_cast<double>(anchors.size());
}

}  // namespace

double task_variance(const std::vector<Vec>& anchors) {
  check_anchors(anchors, "task_variance");
  const Vec mean = anchor_mean(anchors);
  double total = 0.0;
  for (const auto& a : anchors) total += (a - mean).squaredNorm();
  return total / static_cast<double>(anchors.size());
}

double kl_similarity(const std::vector<Vec>& anchors) {
  check_anchors(anchors, "kl_similarity");
  const Vec mean = anchor_mean(anchors);
  double total = 0.0;
  for (const auto& a : anchors) {
    for (int j = 0; j < a.size(); ++j) {
      if (a[j] > 0.0) total += a[j] * std::log(a[j] / mean[j]);
    }
  }
  return total / static_cast<double>(anchors.size());
}

double entropy(const Vec& p) {
  double h = 0.0;
  for (int j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) h -= p[j] * std::log(p[j]);
  }
  return h;
}

double potential_difference(const PotentialGame& a, const PotentialGame& b) {
  if (a.potential_table.size() != b.potential_table.size() ||
      a.base.actions() != b.base.actions()) {
    throw InvalidInputError("potential_difference: games have different shapes");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < a.potential_table.size(); ++f) {
    best = std::max(best, a.potential_table[f] - b.potential_table[f]);
  }
  return best;
}

double v_diff(const std::vector<PotentialGame>& games) {
  if (games.empty()) throw InvalidInputError("v_diff: no games");
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < games.size(); ++t) {
    total += potential_difference(games[t], games[t + 1]);
  }
  return total / static_cast<double>(games.size());
}

double ne_variance(const std::vector<Vec>& equilibria) {
  return task_variance(equilibria);
}

BestNeResult ne_variance_best(const std::vector<MatrixGame>& games,
                              const std::vector<double>& values, int max_iterations,
                              double tol) {
  if (games.empty() || games.size() != values.size()) {
    throw InvalidInputError("ne_variance_best: need one value per game");
  }
  const int dx = games[0].dx();
  const int dy = games[0].dy();
  const double t = static_cast<double>(games.size());
  auto project = [&](std::size_t k, const Vec& z) {
    Vec p(dx + dy);
    p.head(dx) = project_optimal_face(games[k], values[k], true, z.head(dx));
    p.tail(dy) = project_optimal_face(games[k], values[k], false, z.tail(dy));
    return p;
  };
  // Averaged projections: z <- mean_t P_t(z) is gradient descent with unit
  // step on (1/2T) sum_t dist^2(z, Z*_t), a convex function with 1-Lipschitz
  // gradient.
  BestNeResult res;
  res.center = Vec::Zero(dx + dy);
  res.center.head(dx).setConstant(1.0 / dx);
  res.center.tail(dy).setConstant(1.0 / dy);
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    Vec next = Vec::Zero(dx + dy);
    for (std::size_t k = 0; k < games.size(); ++k) next += project(k, res.center);
    next /= t;
    const double change = (next - res.center).lpNorm<Eigen::Infinity>();
    res.center = next;
    if (change <= tol) break;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < games.size(); ++k) {
    total += (project(k, res.center) - res.center).squaredNorm();
  }
  res.value = total / t;
  return res;
}

}  // namespace metagames
