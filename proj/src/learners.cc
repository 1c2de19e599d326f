#include "metagames/learners.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metagames {

namespace {

void check_vector(const Vec& v, int dim, const char* what) {
  if (v.size() != dim) {
    throw InvalidInputError(std::string(what) + ": expected dimension " +
                            std::to_string(dim) + ", got " + std::to_string(v.size()));
  }
  if (!all_finite(v)) throw InvalidInputError(std::string(what) + ": non-finite entry");
}

Vec block_prox(const std::vector<StrategySet>& blocks, Regularizer reg,
               const Vec& anchor, const Vec& g, double eta) {
  if (blocks.empty()) return anchor + eta * g;
  Vec out(anchor.size());
  int offset = 0;
  for (const auto& block : blocks) {
    const int d = set_dim(block);
    out.segment(offset, d) = prox_step(reg, block, Vec(anchor.segment(offset, d)),
                                       Vec(g.segment(offset, d)), eta);
    offset += d;
  }
  return out;
}

Vec block_optimum(const std::vector<StrategySet>& blocks, const Vec& cum) {
  if (blocks.empty()) {
    throw DomainError("optimum in hindsight needs a bounded domain");
  }
  Vec out(cum.size());
  int offset = 0;
  for (const auto& block : blocks) {
    const int d = set_dim(block);
    out.segment(offset, d) = optimum_in_hindsight(block, Vec(cum.segment(offset, d)));
    offset += d;
  }
  return out;
}

double block_bregman(const std::vector<StrategySet>& blocks, Regularizer reg,
                     const Vec& x, const Vec& xp) {
  if (blocks.empty() || reg == Regularizer::kEuclidean) return bregman(reg, x, xp);
  double total = 0.0;
  int offset = 0;
  for (const auto& block : blocks) {
    const int d = set_dim(block);
    total += bregman(reg, Vec(x.segment(offset, d)), Vec(xp.segment(offset, d)));
    offset += d;
  }
  return total;
}

double q_norm2(const Vec& v, const Vec& q) { return (v.array().square() * q.array()).sum(); }

}  // namespace

const char* prediction_mode_name(PredictionMode mode) {
  switch (mode) {
    case PredictionMode::kRecency: return "recency";
    case PredictionMode::kZero: return "zero";
    case PredictionMode::kSecondaryAnchor: return "secondary-anchor";
    case PredictionMode::kAlternating: return "alternating";
  }
  return "recency";
}

PredictionMode parse_prediction_mode(const std::string& name) {
  if (name == "recency") return PredictionMode::kRecency;
  if (name == "zero") return PredictionMode::kZero;
  if (name == "secondary-anchor") return PredictionMode::kSecondaryAnchor;
  if (name == "alternating") return PredictionMode::kAlternating;
  throw ConfigError("unknown prediction mode '" + name + "'");
}

double primal_norm2(Regularizer reg, const Vec& v) {
  if (reg == Regularizer::kEntropic) {
    const double n = v.lpNorm<1>();
    return n * n;
  }
  return v.squaredNorm();
}

double dual_norm2(Regularizer reg, const Vec& v) {
  if (reg == Regularizer::kEntropic) {
    const double n = v.lpNorm<Eigen::Infinity>();
    return n * n;
  }
  return v.squaredNorm();
}

LearnerState make_learner(const StrategySet& set, Regularizer reg, double eta,
                          const Vec& init, const Vec& first_prediction,
                          PredictionMode mode) {
  if (!(eta > 0.0)) throw ConfigError("learner: eta must be positive");
  const int d = set_dim(set);
  check_vector(init, d, "learner init");
  check_vector(first_prediction, d, "learner first prediction");
  if (!is_feasible(set, init)) throw InvalidInputError("learner: infeasible init");
  LearnerState s;
  s.set = set;
  s.reg = reg;
  s.eta = eta;
  s.mode = mode;
  s.init = init;
  s.secondary = init;
  s.last_play = init;
  s.prediction = first_prediction;
  s.primary = prox_step(reg, set, init, first_prediction, eta);
  s.cum_utility = Vec::Zero(d);
  s.secondaries.push_back(init);
  return s;
}

void set_prediction(LearnerState& state, const Vec& prediction) {
  check_vector(prediction, set_dim(state.set), "set_prediction");
  state.prediction = prediction;
  state.primary = prox_step(state.reg, state.set, state.secondary, prediction, state.eta);
}

void omd_step(LearnerState& state, const Vec& utility) {
  check_vector(utility, set_dim(state.set), "omd_step utility");
  if (!is_feasible(state.set, state.primary, 1e-8)) {
    throw NumericError("omd_step: primary iterate left the strategy set");
  }
  const Vec& x = state.primary;
  const Vec xh_prev = state.secondary;
  const Vec xh = prox_step(state.reg, state.set, xh_prev, utility, state.eta);

  const double pred_err = dual_norm2(state.reg, utility - state.prediction);
  const double path = primal_norm2(state.reg, x - state.last_play);
  state.sum_pred_err2 += pred_err;
  state.sum_path2 += path;
  state.sum_refined2 += primal_norm2(state.reg, x - xh) + primal_norm2(state.reg, x - xh_prev);
  state.cum_utility += utility;
  state.cum_value += x.dot(utility);
  ++state.steps;

  if (state.record_history) {
    state.plays.push_back(x);
    state.utilities.push_back(utility);
    state.predictions.push_back(state.prediction);
    state.secondaries.push_back(xh);
    state.etas.push_back(state.eta);
  }
  state.last_play = x;
  state.secondary = xh;

  if (state.doubling) {
    state.epoch_pred_err2 += pred_err;
    state.epoch_path2 += path;
    const double residual =
        state.eta * state.epoch_pred_err2 - state.epoch_path2 / (8.0 * state.eta);
    if (residual > 0.0) {
      state.eta *= 0.5;
      ++state.eta_halvings;
      state.epoch_pred_err2 = 0.0;
      state.epoch_path2 = 0.0;
    }
  }

  state.prediction = state.mode == PredictionMode::kZero
                         ? Vec(Vec::Zero(utility.size()))
                         : utility;
  state.primary = prox_step(state.reg, state.set, state.secondary, state.prediction,
                            state.eta);
}

Vec optimum_in_hindsight(const StrategySet& set, const Vec& cum) {
  const int d = set_dim(set);
  check_vector(cum, d, "optimum_in_hindsight");
  if (const auto* box = std::get_if<Box>(&set)) {
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = cum[j] > 0.0 ? box->upper[j] : box->lower[j];
    return x;
  }
  int best = 0;
  for (int j = 1; j < d; ++j) {
    if (cum[j] > cum[best]) best = j;
  }
  return Vec::Unit(d, best);
}

RegretResult external_regret(const StrategySet& set, const std::vector<Vec>& plays,
                             const std::vector<Vec>& utilities,
                             const std::optional<Vec>& comparator) {
  if (plays.empty() || plays.size() != utilities.size()) {
    throw InvalidInputError("external_regret: need aligned, nonempty history");
  }
  Vec cum = Vec::Zero(set_dim(set));
  double realized = 0.0;
  for (std::size_t i = 0; i < plays.size(); ++i) {
    cum += utilities[i];
    realized += plays[i].dot(utilities[i]);
  }
  RegretResult r;
  r.comparator = comparator ? *comparator : optimum_in_hindsight(set, cum);
  r.value = r.comparator.dot(cum) - realized;
  return r;
}

RegretResult external_regret(const LearnerState& state,
                             const std::optional<Vec>& comparator) {
  if (state.steps == 0) throw InvalidInputError("external_regret: empty history");
  RegretResult r;
  r.comparator = comparator ? *comparator : optimum_in_hindsight(state.set, state.cum_utility);
  r.value = r.comparator.dot(state.cum_utility) - state.cum_value;
  return r;
}

AlphaWeights make_alpha_weights(AlphaSchedule schedule, int m, const Vec& custom) {
  if (m < 1) throw ConfigError("alpha weights: m must be >= 1");
  AlphaWeights w;
  w.schedule = schedule;
  w.values.resize(m);
  const double md = m;
  for (int i = 1; i <= m; ++i) {
    switch (schedule) {
      case AlphaSchedule::kUniform: w.values[i - 1] = 1.0; break;
      case AlphaSchedule::kLinear: w.values[i - 1] = 2.0 * i / (md + 1.0); break;
      case AlphaSchedule::kQuadratic:
        w.values[i - 1] = 6.0 * i * i / ((md + 1.0) * (2.0 * md + 1.0));
        break;
      case AlphaSchedule::kCustom: break;
    }
  }
  if (schedule == AlphaSchedule::kCustom) {
    if (custom.size() != m) throw ConfigError("alpha weights: custom length must equal m");
    w.values = custom;
  }
  if (!(w.values.array() > 0.0).all()) throw ConfigError("alpha weights must be positive");
  for (int i = 1; i < m; ++i) {
    if (w.values[i] < w.values[i - 1]) throw ConfigError("alpha weights must be nondecreasing");
  }
  if (std::abs(w.values.sum() - md) > 1e-9) throw ConfigError("alpha weights must sum to m");
  return w;
}

RegretResult alpha_regret(const StrategySet& set, const std::vector<Vec>& plays,
                          const std::vector<Vec>& utilities,
                          const AlphaWeights& weights) {
  if (plays.empty() || plays.size() != utilities.size() ||
      static_cast<std::size_t>(weights.values.size()) != plays.size()) {
    throw InvalidInputError("alpha_regret: weights, plays and utilities must align");
  }
  Vec cum = Vec::Zero(set_dim(set));
  double realized = 0.0;
  for (std::size_t i = 0; i < plays.size(); ++i) {
    cum += weights.values[i] * utilities[i];
    realized += weights.values[i] * plays[i].dot(utilities[i]);
  }
  RegretResult r;
  r.comparator = optimum_in_hindsight(set, cum);
  r.value = r.comparator.dot(cum) - realized;
  return r;
}

double rvu_bound(const LearnerState& state, const Vec& comparator, RvuStrength strength) {
  const double eta = state.eta;
  const double init_term = bregman(state.reg, comparator, state.init) / eta;
  const double variation = eta * state.sum_pred_err2;
  const double path = strength == RvuStrength::kStandard
                          ? state.sum_path2 / (8.0 * eta)
                          : state.sum_refined2 / (2.0 * eta);
  return init_term + variation - path;
}

double weighted_rvu_bound(const LearnerState& state, const AlphaWeights& weights,
                          const Vec& comparator) {
  const int m = static_cast<int>(state.plays.size());
  if (m == 0 || weights.values.size() != m ||
      static_cast<int>(state.secondaries.size()) != m + 1) {
    throw InvalidInputError("weighted_rvu_bound: needs the full history");
  }
  const double eta = state.eta;
  const Vec& a = weights.values;
  double max_div = 0.0;
  for (int i = 1; i <= m - 1; ++i) {
    max_div = std::max(max_div, bregman(state.reg, comparator, state.secondaries[i]));
  }
  double bound = a[0] / eta * bregman(state.reg, comparator, state.secondaries[0]) +
                 (a[m - 1] - a[0]) / eta * max_div;
  for (int i = 0; i < m; ++i) {
    const Vec& x = state.plays[i];
    bound += eta * a[i] * dual_norm2(state.reg, state.utilities[i] - state.predictions[i]);
    bound -= a[i] / (2.0 * eta) *
             (primal_norm2(state.reg, x - state.secondaries[i]) +
              primal_norm2(state.reg, x - state.secondaries[i + 1]));
  }
  return bound;
}

Vec gd_step(const StrategySet& set, const Vec& x, const Vec& utility, double eta) {
  if (!(eta > 0.0)) throw ConfigError("gd_step: eta must be positive");
  check_vector(utility, set_dim(set), "gd_step utility");
  return project_l2(set, x + eta * utility);
}

Vec mwu_step(const Vec& dist, const Vec& losses, double eta) {
  if (!(eta > 0.0)) throw ConfigError("mwu_step: eta must be positive");
  check_vector(losses, static_cast<int>(dist.size()), "mwu_step losses");
  Vec logits(dist.size());
  for (int j = 0; j < dist.size(); ++j) {
    logits[j] = dist[j] > 0.0 ? std::log(dist[j]) - eta * losses[j]
                              : -std::numeric_limits<double>::infinity();
  }
  const double shift = logits.maxCoeff();
  Vec w = (logits.array() - shift).exp().matrix();
  return w / w.sum();
}

EgState make_eg(const VIOperator& op, Regularizer reg, double eta, const Vec& init) {
  if (!(eta > 0.0)) throw ConfigError("extra-gradient: eta must be positive");
  check_vector(init, op.dim, "extra-gradient init");
  EgState s;
  s.blocks = op.blocks;
  s.reg = reg;
  s.eta = eta;
  s.init = init;
  s.current = init;
  s.last_utility = -op.eval(init);
  s.primaries.push_back(init);
  s.utilities.push_back(s.last_utility);
  return s;
}

void eg_step(EgState& state, const VIOperator& op) {
  const Vec xh = block_prox(state.blocks, state.reg, state.current, state.last_utility,
                            state.eta);
  const Vec uh = -op.eval(xh);
  if (!all_finite(uh)) throw NumericError("extra-gradient: operator returned non-finite value");
  const Vec x = block_prox(state.blocks, state.reg, state.current, uh, state.eta);
  const Vec u = -op.eval(x);
  if (!all_finite(u)) throw NumericError("extra-gradient: operator returned non-finite value");
  state.secondaries.push_back(xh);
  state.aux_utilities.push_back(uh);
  state.primaries.push_back(x);
  state.utilities.push_back(u);
  state.current = x;
  state.last_utility = u;
}

RegretResult eg_proxy_regret(const EgState& state, const std::optional<Vec>& comparator) {
  if (state.secondaries.empty()) throw InvalidInputError("eg_proxy_regret: no steps");
  Vec cum = Vec::Zero(state.init.size());
  double realized = 0.0;
  for (std::size_t i = 0; i < state.secondaries.size(); ++i) {
    cum += state.aux_utilities[i];
    realized += state.secondaries[i].dot(state.aux_utilities[i]);
  }
  RegretResult r;
  r.comparator = comparator ? *comparator : block_optimum(state.blocks, cum);
  r.value = r.comparator.dot(cum) - realized;
  return r;
}

double eg_rvu_bound(const EgState& state, const Vec& comparator) {
  const double eta = state.eta;
  double bound = block_bregman(state.blocks, state.reg, comparator, state.init) / eta;
  for (std::size_t i = 0; i < state.secondaries.size(); ++i) {
    const Vec& xh = state.secondaries[i];
    bound += eta * dual_norm2(state.reg, state.aux_utilities[i] - state.utilities[i]);
    bound -= (primal_norm2(state.reg, xh - state.primaries[i + 1]) +
              primal_norm2(state.reg, xh - state.primaries[i])) /
             (2.0 * eta);
  }
  return bound;
}

Vec project_preconditioned(const StrategySet& set, const Vec& y, const Vec& q_diag) {
  if (q_diag.size() != y.size() || !(q_diag.array() > 0.0).all() || !all_finite(q_diag)) {
    throw ConfigError("preconditioner must be positive definite");
  }
  if (std::holds_alternative<Box>(set)) return project_l2(set, y);
  if ((q_diag.array() == q_diag[0]).all()) return project_l2(set, y);
  return project_weighted_simplex(y, q_diag);
}

AdaGradState make_adagrad(const StrategySet& set, const Vec& first_prediction) {
  const int d = set_dim(set);
  check_vector(first_prediction, d, "adagrad first prediction");
  AdaGradState s;
  s.set = set;
  s.init = project_l2(set, Vec(Vec::Zero(d)));
  s.secondary = s.init;
  s.prediction = first_prediction;
  s.secondaries.push_back(s.init);
  return s;
}

Vec adagrad_play(AdaGradState& state, const Vec& q_diag) {
  const Vec x = project_preconditioned(
      state.set, state.secondary + state.prediction.cwiseQuotient(q_diag), q_diag);
  state.plays.push_back(x);
  state.predictions.push_back(state.prediction);
  state.preconditioners.push_back(q_diag);
  return x;
}

void adagrad_update(AdaGradState& state, const Vec& utility, const Vec& next_prediction) {
  if (state.plays.size() != state.utilities.size() + 1) {
    throw InvalidInputError("adagrad_update: call adagrad_play first");
  }
  check_vector(utility, set_dim(state.set), "adagrad utility");
  const Vec& q = state.preconditioners.back();
  state.secondary =
      project_preconditioned(state.set, state.secondary + utility.cwiseQuotient(q), q);
  state.secondaries.push_back(state.secondary);
  state.utilities.push_back(utility);
  state.prediction = next_prediction;
}

Vec optadagrad_step(AdaGradState& state, const Vec& q_diag, const Vec& utility,
                    const Vec& next_prediction) {
  Vec x = adagrad_play(state, q_diag);
  adagrad_update(state, utility, next_prediction);
  return x;
}

double adagrad_drift(const AdaGradState& state) {
  double sigma = 0.0;
  for (std::size_t i = 1; i < state.preconditioners.size(); ++i) {
    sigma += (state.preconditioners[i] - state.preconditioners[i - 1])
                 .lpNorm<Eigen::Infinity>();
  }
  return sigma;
}

double adagrad_bound(const AdaGradState& state, const Vec& comparator) {
  const std::size_t m = state.utilities.size();
  if (m == 0) throw InvalidInputError("adagrad_bound: no steps");
  const double omega = set_diameter(state.set);
  double bound = 0.5 * q_norm2(comparator - state.init, state.preconditioners[0]) +
                 0.5 * omega * omega * adagrad_drift(state);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& q = state.preconditioners[i];
    const Vec diff = state.utilities[i] - state.predictions[i];
    bound += (diff.array().square() / q.array()).sum();
    bound -= 0.5 * (q_norm2(state.plays[i] - state.secondaries[i], q) +
                    q_norm2(state.plays[i] - state.secondaries[i + 1], q));
  }
  return bound;
}

}  // namespace metagames
