#include "metagames/swapregret.h"

#include <cmath>
#include <limits>

namespace metagames {

namespace {

constexpr double kResidualTarget = 1e-8;

Vec optimum_with_offset(const LearnerState& learner, double alpha) {
  const int d = set_dim(learner.set);
  const Vec opt = optimum_in_hindsight(learner.set, learner.cum_utility);
  return (1.0 - alpha) * opt + alpha * Vec::Constant(d, 1.0 / d);
}

}  // namespace

double stationary_residual(const Mat& q, const Vec& pi) {
  return (q.transpose() * pi - pi).lpNorm<1>();
}

Vec stationary_distribution(const Mat& q) {
  const int d = static_cast<int>(q.rows());
  if (d == 0 || q.cols() != d) throw InvalidInputError("stationary: matrix must be square");
  if (!q.allFinite() || q.minCoeff() < 0.0) {
    throw InvalidInputError("stationary: entries must be finite and nonnegative");
  }
  for (int r = 0; r < d; ++r) {
    if (std::abs(q.row(r).sum() - 1.0) > 1e-9) {
      throw InvalidInputError("stationary: row " + std::to_string(r) + " does not sum to 1");
    }
  }
  const Mat lazy_t = 0.5 * (Mat::Identity(d, d) + q).transpose();
  Vec pi = Vec::Constant(d, 1.0 / d);
  for (int it = 0; it < 100000; ++it) {
    Vec next = lazy_t * pi;
    next /= next.sum();
    const double change = (next - pi).lpNorm<1>();
    pi = next;
    if (change < 1e-15) break;
  }
  if (stationary_residual(q, pi) <= 1e-12) return pi;

  if (d <= 64) {
    // Solve (Q^T - I) pi = 0 with the normalization row sum(pi) = 1.
    Mat sys(d + 1, d);
    sys.topRows(d) = q.transpose() - Mat::Identity(d, d);
    sys.row(d).setOnes();
    Vec rhs = Vec::Zero(d + 1);
    rhs[d] = 1.0;
    Vec direct = sys.colPivHouseholderQr().solve(rhs).cwiseMax(0.0);
    if (direct.sum() > 0.0) {
      direct /= direct.sum();
      if (stationary_residual(q, direct) < stationary_residual(q, pi)) pi = direct;
    }
  }
  const double residual = stationary_residual(q, pi);
  if (residual > kResidualTarget) {
    throw NumericError("stationary: residual " + std::to_string(residual) +
                       " above 1e-8 for a " + std::to_string(d) + "-state chain");
  }
  return pi;
}

double default_swap_eta(int num_players, int d, double lipschitz) {
  if (num_players < 1 || d < 1 || !(lipschitz > 0.0)) {
    throw ConfigError("swap eta: need positive player count, dimension and Lipschitz constant");
  }
  return 1.0 / (64.0 * num_players * d * lipschitz);
}

SwapWrapper make_swap_wrapper(int d, double eta, const std::vector<Vec>& inits) {
  if (d < 1) throw ConfigError("swap wrapper: d must be >= 1");
  if (!inits.empty() && static_cast<int>(inits.size()) != d) {
    throw ConfigError("swap wrapper: one initialization per action");
  }
  SwapWrapper w;
  w.d = d;
  w.transition.resize(d, d);
  const Vec uniform = Vec::Constant(d, 1.0 / d);
  for (int a = 0; a < d; ++a) {
    const Vec& init = inits.empty() ? uniform : inits[a];
    w.learners.push_back(make_learner(Simplex{d}, Regularizer::kLogBarrier, eta, init,
                                      Vec::Zero(d), PredictionMode::kRecency));
    w.transition.row(a) = w.learners.back().primary.transpose();
  }
  w.mix = stationary_distribution(w.transition);
  w.max_stationary_residual = stationary_residual(w.transition, w.mix);
  return w;
}

void swap_step(SwapWrapper& wrapper, const Vec& utility) {
  if (utility.size() != wrapper.d || !all_finite(utility)) {
    throw InvalidInputError("swap_step: utility has wrong size or non-finite entries");
  }
  wrapper.plays.push_back(wrapper.mix);
  wrapper.utilities.push_back(utility);
  for (int a = 0; a < wrapper.d; ++a) {
    omd_step(wrapper.learners[a], wrapper.mix[a] * utility);
    wrapper.transition.row(a) = wrapper.learners[a].primary.transpose();
  }
  wrapper.mix = stationary_distribution(wrapper.transition);
  wrapper.max_stationary_residual =
      std::max(wrapper.max_stationary_residual,
               stationary_residual(wrapper.transition, wrapper.mix));
}

double swap_regret(const std::vector<Vec>& plays, const std::vector<Vec>& utilities) {
  if (plays.empty() || plays.size() != utilities.size()) {
    throw InvalidInputError("swap_regret: need aligned, nonempty history");
  }
  const int d = static_cast<int>(plays[0].size());
  // flow(a, b) = sum_i x^i[a] u^i[b]
  Mat flow = Mat::Zero(d, d);
  for (std::size_t i = 0; i < plays.size(); ++i) flow += plays[i] * utilities[i].transpose();
  double total = 0.0;
  for (int a = 0; a < d; ++a) total += flow.row(a).maxCoeff() - flow(a, a);
  return total;
}

double swap_regret_enumerate(const std::vector<Vec>& plays,
                             const std::vector<Vec>& utilities) {
  if (plays.empty() || plays.size() != utilities.size()) {
    throw InvalidInputError("swap_regret_enumerate: need aligned, nonempty history");
  }
  const int d = static_cast<int>(plays[0].size());
  if (d > 6) throw InvalidInputError("swap_regret_enumerate: d must be <= 6");
  Mat flow = Mat::Zero(d, d);
  for (std::size_t i = 0; i < plays.size(); ++i) flow += plays[i] * utilities[i].transpose();
  long maps = 1;
  for (int a = 0; a < d; ++a) maps *= d;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> phi(d, 0);
  for (long code = 0; code < maps; ++code) {
    long rest = code;
    double gain = 0.0;
    for (int a = 0; a < d; ++a) {
      phi[a] = static_cast<int>(rest % d);
      rest /= d;
      gain += flow(a, phi[a]) - flow(a, a);
    }
    best = std::max(best, gain);
  }
  return best;
}

double per_action_regret_sum(const SwapWrapper& wrapper, double alpha) {
  double total = 0.0;
  for (const auto& learner : wrapper.learners) {
    if (learner.steps == 0) continue;
    total += external_regret(learner, optimum_with_offset(learner, alpha)).value;
  }
  return total;
}

double swap_rvu_rhs(const SwapWrapper& wrapper, double alpha) {
  if (!(alpha > 0.0)) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& learner : wrapper.learners) {
    total += bregman(Regularizer::kLogBarrier, optimum_with_offset(learner, alpha),
                     learner.init) /
             learner.eta;
  }
  return total;
}

double swap_offset_alpha(int m, int num_tasks) {
  if (m < 1 || num_tasks < 1) throw ConfigError("swap offset: m and T must be >= 1");
  return std::pow(static_cast<double>(m) * num_tasks, -1.0 / 3.0);
}

}  // namespace metagames
