#include "metagames/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace metagames {

namespace {

constexpr double kPivotTol = 1e-12;

void require_same(int expected, int got, const char* what) {
  if (expected != got) throw InvalidInputError(std::string(what) + ": dimension mismatch");
}

// Euclidean projection of z onto {x : 1^T x = 1, C x <= e} by a primal
// active-set method started at the feasible point x0. Constraints are relaxed
// just enough to contain x0, which absorbs rounding in the LP value.
Vec project_polytope(const Mat& c, Vec e, const Vec& z, const Vec& x0) {
  const int d = static_cast<int>(z.size());
  const int k = static_cast<int>(c.rows());
  e = e.cwiseMax(c * x0);
  Vec x = x0 / x0.sum();
  std::vector<int> working;

  auto active_rows = [&]() {
    Mat m(1 + working.size(), d);
    m.row(0).setOnes();
    for (std::size_t w = 0; w < working.size(); ++w) m.row(1 + w) = c.row(working[w]);
    return m;
  };
  auto independent = [&](int r) {
    Mat m(2 + working.size(), d);
    m.topRows(1 + working.size()) = active_rows();
    m.row(1 + working.size()) = c.row(r);
    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(1e-10);
    return lu.rank() == m.rows();
  };
  for (int r = 0; r < k; ++r) {
    if (c.row(r).dot(x) >= e[r] - 1e-12 && independent(r)) working.push_back(r);
  }

  const int max_iterations = 20 * (d + k) + 100;
  for (int it = 0; it < max_iterations; ++it) {
    const Mat m = active_rows();
    const Vec g = z - x;
    // Multipliers of g in the span of the active normals; the step is the
    // component of g orthogonal to them.
    const Vec mult = m.transpose().colPivHouseholderQr().solve(g);
    const Vec p = g - m.transpose() * mult;
    if (p.lpNorm<Eigen::Infinity>() <= 1e-13) {
      int drop = -1;
      double most_negative = -1e-12;
      for (std::size_t w = 0; w < working.size(); ++w) {
        if (mult[1 + w] < most_negative) {
          most_negative = mult[1 + w];
          drop = static_cast<int>(w);
        }
      }
      if (drop < 0) return x;
      working.erase(working.begin() + drop);
      continue;
    }
    double step = 1.0;
    int blocking = -1;
    for (int r = 0; r < k; ++r) {
      if (std::find(working.begin(), working.end(), r) != working.end()) continue;
      const double rate = c.row(r).dot(p);
      if (rate <= 1e-15) continue;
      const double room = std::max(0.0, e[r] - c.row(r).dot(x));
      if (room / rate < step) {
        step = room / rate;
        blocking = r;
      }
    }
    x += step * p;
    if (blocking >= 0) working.push_back(blocking);
  }
  throw NumericError("face projection: active-set iteration limit reached");
}

}  // namespace

NashSolution solve_nash_lp(const MatrixGame& game) {
  const Mat loss = game.loss_matrix();
  const int dx = game.dx();
  const int dy = game.dy();
  if (dx > 200 || dy > 200) throw InvalidInputError("solve_nash_lp: d must be <= 200");
  const double shift = 1.0 - loss.minCoeff();
  const Mat b = loss.array() + shift;

  const int cols = dx + dy;
  const int rhs = cols;
  const int obj = dy;
  Mat t = Mat::Zero(dy + 1, cols + 1);
  t.block(0, 0, dy, dx) = b.transpose();
  t.block(0, dx, dy, dy) = Mat::Identity(dy, dy);
  t.col(rhs).head(dy).setOnes();
  t.row(obj).head(dx).setConstant(-1.0);
  std::vector<int> basis(dy);
  for (int j = 0; j < dy; ++j) basis[j] = dx + j;

  const int max_pivots = 100000;
  int pivots = 0;
  while (true) {
    int enter = -1;
    for (int c = 0; c < cols; ++c) {
      if (t(obj, c) < -kPivotTol) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < dy; ++r) {
      if (t(r, enter) <= kPivotTol) continue;
      const double ratio = t(r, rhs) / t(r, enter);
      if (ratio < best - kPivotTol ||
          (std::abs(ratio - best) <= kPivotTol && basis[r] < basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave < 0) throw NumericError("solve_nash_lp: unbounded tableau");
    t.row(leave) /= t(leave, enter);
    for (int r = 0; r <= dy; ++r) {
      if (r == leave) continue;
      const double f = t(r, enter);
      if (f != 0.0) t.row(r) -= f * t.row(leave);
    }
    basis[leave] = enter;
    if (++pivots > max_pivots) {
      throw NumericError("solve_nash_lp: pivot limit reached (" +
                         std::to_string(max_pivots) + ")");
    }
  }

  Vec w = Vec::Zero(dx);
  for (int r = 0; r < dy; ++r) {
    if (basis[r] < dx) w[basis[r]] = std::max(t(r, rhs), 0.0);
  }
  Vec u = t.row(obj).segment(dx, dy).transpose().cwiseMax(0.0);
  const double total = w.sum();
  if (!(total > 0.0) || !(u.sum() > 0.0)) {
    throw NumericError("solve_nash_lp: degenerate optimum");
  }
  NashSolution sol;
  sol.x = w / total;
  sol.y = u / u.sum();
  sol.value = 1.0 / total - shift;
  return sol;
}

double duality_gap(const MatrixGame& game, const Vec& x, const Vec& y) {
  require_same(game.dx(), static_cast<int>(x.size()), "duality_gap");
  require_same(game.dy(), static_cast<int>(y.size()), "duality_gap");
  const Mat a = game.loss_matrix();
  const double best_y = (a.transpose() * x).maxCoeff();
  const double best_x = (a * y).minCoeff();
  return best_y - best_x;
}

std::vector<double> ne_gap(const MatrixGame& game, const Vec& x, const Vec& y) {
  require_same(game.dx(), static_cast<int>(x.size()), "ne_gap");
  require_same(game.dy(), static_cast<int>(y.size()), "ne_gap");
  const Mat a = game.loss_matrix();
  const Vec ay = a * y;
  const Vec atx = a.transpose() * x;
  const double v = x.dot(ay);
  return {v - ay.minCoeff(), atx.maxCoeff() - v};
}

std::vector<double> ne_gap(const NormalFormGame& game,
                           const std::vector<Vec>& profile) {
  std::vector<double> gaps(game.num_players());
  for (int k = 0; k < game.num_players(); ++k) {
    const Vec u = game.utility(k, profile);
    gaps[k] = u.maxCoeff() - u.dot(profile[k]);
  }
  return gaps;
}

std::vector<double> product_distribution(const NormalFormGame& game,
                                         const std::vector<Vec>& profile) {
  std::vector<double> joint(game.num_profiles());
  for (int flat = 0; flat < game.num_profiles(); ++flat) {
    const auto actions = game.decode(flat);
    double p = 1.0;
    for (int k = 0; k < game.num_players(); ++k) p *= profile[k][actions[k]];
    joint[flat] = p;
  }
  return joint;
}

std::vector<double> average_product_distribution(
    const NormalFormGame& game, const std::vector<std::vector<Vec>>& trajectory) {
  if (trajectory.empty()) throw InvalidInputError("average_product_distribution: empty");
  std::vector<double> avg(game.num_profiles(), 0.0);
  for (const auto& profile : trajectory) {
    const auto joint = product_distribution(game, profile);
    for (int f = 0; f < game.num_profiles(); ++f) avg[f] += joint[f];
  }
  for (auto& v : avg) v /= static_cast<double>(trajectory.size());
  return avg;
}

EquilibriumGaps cce_ce_gap(const std::vector<double>& joint,
                           const NormalFormGame& game) {
  if (static_cast<int>(joint.size()) != game.num_profiles()) {
    throw InvalidInputError("cce_ce_gap: joint distribution has wrong size");
  }
  if (game.num_profiles() > 10000) {
    throw InvalidInputError("cce_ce_gap: more than 1e4 profiles");
  }
  double mass = 0.0;
  for (double p : joint) mass += p;
  if (std::abs(mass - 1.0) > 1e-9) {
    throw InvalidInputError("cce_ce_gap: joint distribution does not sum to 1");
  }
  EquilibriumGaps gaps{-std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity()};
  for (int k = 0; k < game.num_players(); ++k) {
    const int d = game.actions()[k];
    // benefit(a, b): expected gain from playing b whenever a is recommended.
    Mat benefit = Mat::Zero(d, d);
    for (int flat = 0; flat < game.num_profiles(); ++flat) {
      if (joint[flat] == 0.0) continue;
      auto actions = game.decode(flat);
      const int a = actions[k];
      const double base = game.payoff(k, flat);
      for (int b = 0; b < d; ++b) {
        actions[k] = b;
        benefit(a, b) += joint[flat] * (game.payoff(k, game.flat_index(actions)) - base);
      }
    }
    gaps.cce = std::max(gaps.cce, benefit.colwise().sum().maxCoeff());
    gaps.ce = std::max(gaps.ce, benefit.rowwise().maxCoeff().sum());
  }
  return gaps;
}

double svi_residual(const VIOperator& op, const Vec& z) {
  if (op.blocks.empty()) {
    throw DomainError("svi_residual: operator has no bounded domain");
  }
  const Vec f = op.eval(z);
  double best = 0.0;
  int offset = 0;
  for (const auto& block : op.blocks) {
    const int d = set_dim(block);
    const auto fb = f.segment(offset, d);
    if (const auto* box = std::get_if<Box>(&block)) {
      for (int j = 0; j < d; ++j) {
        best += std::min(box->lower[j] * fb[j], box->upper[j] * fb[j]);
      }
    } else {
      best += fb.minCoeff();
    }
    offset += d;
  }
  return z.dot(f) - best;
}

double social_welfare(const NormalFormGame& game, const std::vector<Vec>& profile) {
  double sw = 0.0;
  for (int k = 0; k < game.num_players(); ++k) sw += game.expected_payoff(k, profile);
  return sw;
}

WelfareReport welfare_report(const NormalFormGame& game, const SmoothnessMeta& meta,
                             const std::vector<std::vector<Vec>>& trajectory,
                             double sum_regrets) {
  if (trajectory.empty()) throw InvalidInputError("welfare_report: empty trajectory");
  WelfareReport rep;
  for (const auto& profile : trajectory) rep.average_welfare += social_welfare(game, profile);
  const double m = static_cast<double>(trajectory.size());
  rep.average_welfare /= m;
  rep.robust_poa = meta.robust_poa();
  rep.poa_floor = rep.robust_poa * meta.opt_welfare;
  rep.regret_slack = sum_regrets / (m * (1.0 + meta.mu));
  rep.margin = rep.average_welfare - (rep.poa_floor - rep.regret_slack);
  return rep;
}

PathLengths path_lengths(const std::vector<Vec>& primary,
                         const std::vector<Vec>& secondary) {
  PathLengths out;
  for (std::size_t i = 1; i < primary.size(); ++i) {
    out.first += (primary[i] - primary[i - 1]).squaredNorm();
  }
  if (!secondary.empty()) {
    if (secondary.size() != primary.size()) {
      throw InvalidInputError("path_lengths: primary and secondary lengths differ");
    }
    for (std::size_t i = 1; i < primary.size(); ++i) {
      out.refined += (primary[i] - secondary[i]).squaredNorm() +
                     (primary[i] - secondary[i - 1]).squaredNorm();
    }
  }
  return out;
}

Vec project_optimal_face(const MatrixGame& game, double value, bool row,
                         const Vec& z) {
  const Mat a = game.loss_matrix();
  const int d = row ? game.dx() : game.dy();
  require_same(d, static_cast<int>(z.size()), "project_optimal_face");
  const NashSolution ne = solve_nash_lp(game);
  const Vec& start = row ? ne.x : ne.y;
  // Constraints: the optimality cut for every opposing action, then x >= 0.
  const int cuts = row ? game.dy() : game.dx();
  Mat c(cuts + d, d);
  Vec e(cuts + d);
  if (row) {
    c.topRows(cuts) = a.transpose();
    e.head(cuts).setConstant(value);
  } else {
    c.topRows(cuts) = -a;
    e.head(cuts).setConstant(-value);
  }
  c.bottomRows(d) = -Mat::Identity(d, d);
  e.tail(d).setZero();
  const double violation = (c * start - e).maxCoeff();
  if (violation > 1e-7) {
    throw InvalidInputError("project_optimal_face: value is inconsistent with the game value");
  }
  return project_polytope(c, e, z, start);
}

}  // namespace metagames
