#include "metagames/stackelberg.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metagames/geometry.h"
#include "metagames/meta.h"

namespace metagames {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kFeasTol = 1e-9;

// Hyperplane a^T x = b.
struct Plane {
  Vec a;
  double b = 0.0;
};

void next_combination(std::vector<int>& idx, int n, bool& done) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) {
    done = true;
    return;
  }
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
}

void dedupe_sorted(std::vector<Vec>& pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    for (int j = 0; j < a.size(); ++j) {
      if (std::abs(a[j] - b[j]) > kFeasTol) return a[j] < b[j];
    }
    return false;
  });
  std::vector<Vec> out;
  for (const auto& p : pts) {
    if (out.empty() || (out.back() - p).lpNorm<Eigen::Infinity>() > kFeasTol) out.push_back(p);
  }
  pts = std::move(out);
}

double kl_divergence(const Vec& p, const Vec& q) {
  double total = 0.0;
  for (int j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) total += p[j] * std::log(p[j] / q[j]);
  }
  return total;
}

}  // namespace

const char* provenance_name(PointProvenance p) {
  switch (p) {
    case PointProvenance::kUser: return "user-supplied";
    case PointProvenance::kBruteForceRegions: return "brute-force-regions";
    case PointProvenance::kGrid: return "grid";
  }
  return "unknown";
}

ExtremePointSet make_point_set(int d, std::vector<Vec> points) {
  if (points.empty()) throw ConfigError("extreme points: empty set");
  for (const auto& p : points) {
    if (p.size() != d || !is_feasible(Simplex{d}, p)) {
      throw ConfigError("extreme points: point is not on the simplex");
    }
  }
  ExtremePointSet set;
  set.points = std::move(points);
  return set;
}

void validate_security_game(const SecurityGame& game) {
  const int d = game.d;
  if (d < 1) throw ConfigError("security game: d must be >= 1");
  if (game.types.empty()) throw ConfigError("security game: no attacker types");
  auto check = [&](const Vec& v, const char* what) {
    if (v.size() != d) throw ConfigError(std::string("security game: ") + what + " has wrong size");
    if (!all_finite(v) || v.cwiseAbs().maxCoeff() > 1.0) {
      throw ConfigError(std::string("security game: ") + what + " must lie in [-1, 1]");
    }
  };
  check(game.defender_covered, "defender covered");
  check(game.defender_uncovered, "defender uncovered");
  for (const auto& t : game.types) {
    check(t.covered, "attacker covered");
    check(t.uncovered, "attacker uncovered");
  }
}

int best_response(const SecurityGame& game, int type, const Vec& coverage) {
  if (type < 0 || type >= static_cast<int>(game.types.size())) {
    throw BoundsError("best_response: type index out of range");
  }
  int best = 0;
  double best_att = game.attacker_utility(type, coverage, 0);
  double best_def = game.defender_utility(coverage, 0);
  for (int j = 1; j < game.d; ++j) {
    const double att = game.attacker_utility(type, coverage, j);
    const double def = game.defender_utility(coverage, j);
    if (att > best_att + kTieTol || (att >= best_att - kTieTol && def > best_def + kTieTol)) {
      best = j;
      best_att = att;
      best_def = def;
    }
  }
  return best;
}

double commitment_value(const SecurityGame& game, int type, const Vec& coverage) {
  return game.defender_utility(coverage, best_response(game, type, coverage));
}

ExtremePointSet brute_force_extreme_points(const SecurityGame& game) {
  const int d = game.d;
  if (d > 5) throw ConfigError("brute-force extreme points need d <= 5");
  validate_security_game(game);
  std::vector<Plane> planes;
  for (int j = 0; j < d; ++j) {
    Plane p{Vec::Zero(d), 0.0};
    p.a[j] = 1.0;
    planes.push_back(p);
  }
  // Attacker utility at target j is uncovered_j + x_j (covered_j - uncovered_j).
  for (const auto& t : game.types) {
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        Plane p{Vec::Zero(d), t.uncovered[j] - t.uncovered[i]};
        p.a[i] = t.covered[i] - t.uncovered[i];
        p.a[j] = -(t.covered[j] - t.uncovered[j]);
        if (p.a.norm() > 0.0) planes.push_back(p);
      }
    }
  }
  std::vector<Vec> vertices;
  const int n = static_cast<int>(planes.size());
  const int k = d - 1;
  if (k == 0) {
    vertices.push_back(Vec::Ones(1));
  } else if (n >= k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    bool done = false;
    Mat sys(d, d);
    Vec rhs(d);
    while (!done) {
      for (int r = 0; r < k; ++r) {
        sys.row(r) = planes[idx[r]].a.transpose();
        rhs[r] = planes[idx[r]].b;
      }
      sys.row(k).setOnes();
      rhs[k] = 1.0;
      Eigen::FullPivLU<Mat> lu(sys);
      if (lu.rank() == d) {
        Vec x = lu.solve(rhs);
        if (x.minCoeff() >= -kFeasTol) {
          x = x.cwiseMax(0.0);
          x /= x.sum();
          vertices.push_back(x);
        }
      }
      next_combination(idx, n, done);
    }
  }
  dedupe_sorted(vertices);
  ExtremePointSet set;
  set.points = std::move(vertices);
  set.provenance = PointProvenance::kBruteForceRegions;
  return set;
}

ExtremePointSet grid_points(int d, double gamma) {
  if (d < 1 || !(gamma > 0.0) || gamma > 1.0) {
    throw ConfigError("grid points: need d >= 1 and gamma in (0, 1]");
  }
  const int steps = static_cast<int>(std::ceil(1.0 / gamma - 1e-12));
  // Number of grid points is C(steps + d - 1, d - 1).
  double count = 1.0;
  for (int i = 1; i < d; ++i) count = count * (steps + i) / i;
  if (count > 2e5) throw ConfigError("grid points: more than 2e5 points; increase gamma");
  ExtremePointSet set;
  set.provenance = PointProvenance::kGrid;
  set.gamma = gamma;
  std::vector<int> c(d, 0);
  // Enumerate compositions of `steps` into d nonnegative parts.
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == d - 1) {
      c[pos] = left;
      Vec x(d);
      for (int j = 0; j < d; ++j) x[j] = static_cast<double>(c[j]) / steps;
      set.points.push_back(x);
      return;
    }
    for (int v = left; v >= 0; --v) {
      c[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, steps);
  return set;
}

ExtremePointSet build_extreme_points(const SecurityGame& game, double gamma) {
  if (game.d <= 5) {
    ExtremePointSet set = brute_force_extreme_points(game);
    set.gamma = gamma;
    return set;
  }
  return grid_points(game.d, gamma);
}

Vec point_utilities(const SecurityGame& game, int type, const ExtremePointSet& points) {
  Vec u(points.size());
  for (int e = 0; e < points.size(); ++e) u[e] = commitment_value(game, type, points.points[e]);
  return u;
}

double stackelberg_regret(const SecurityGame& game, const std::vector<Vec>& played,
                          const std::vector<int>& types, const ExtremePointSet& points) {
  if (points.points.empty()) throw InvalidInputError("stackelberg_regret: empty comparator set");
  if (played.size() != types.size()) {
    throw InvalidInputError("stackelberg_regret: sequences are not aligned");
  }
  double realized = 0.0;
  for (std::size_t i = 0; i < played.size(); ++i) {
    realized += commitment_value(game, types[i], played[i]);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : points.points) {
    double total = 0.0;
    for (int f : types) total += commitment_value(game, f, x);
    best = std::max(best, total);
  }
  return best - realized;
}

AttackerScript random_attackers(int num_tasks, int rounds, const std::vector<int>& allowed,
                                std::uint64_t seed) {
  if (allowed.empty()) throw ConfigError("attacker script: no allowed types");
  AttackerScript script;
  for (int t = 0; t < num_tasks; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> row(rounds);
    for (int i = 0; i < rounds; ++i) {
      row[i] = allowed[rng.index(static_cast<int>(allowed.size()))];
    }
    script.types.push_back(std::move(row));
  }
  return script;
}

StackelbergRun run_meta_stackelberg(const std::vector<SecurityGame>& games,
                                    const AttackerScript& script,
                                    const ExtremePointSet& points,
                                    const StackelbergConfig& config) {
  if (games.empty()) throw ConfigError("stackelberg: no tasks");
  if (points.points.empty()) throw ConfigError("stackelberg: empty extreme-point set");
  if (config.rounds < 1) throw ConfigError("stackelberg: rounds must be >= 1");
  if (script.types.size() != games.size()) {
    throw ConfigError("stackelberg: attacker script must have one row per task");
  }
  const int d = games[0].d;
  for (const auto& g : games) {
    if (g.d != d) throw ConfigError("stackelberg: tasks disagree on the number of targets");
    validate_security_game(g);
  }
  for (const auto& p : points.points) {
    if (p.size() != d) throw ConfigError("stackelberg: extreme points have wrong dimension");
  }

  const int m = config.rounds;
  const int big_t = static_cast<int>(games.size());
  const int ne = points.size();
  const double log_e = std::log(static_cast<double>(ne));

  StackelbergRun run;
  run.num_points = ne;
  run.alpha = config.alpha >= 0.0 ? config.alpha : 1.0 / std::sqrt(static_cast<double>(m) * big_t);
  const double alpha = run.alpha;
  if (alpha > 1.0) throw ConfigError("stackelberg: alpha must be <= 1");

  const double d_bound = std::sqrt(std::log(ne / std::max(alpha, 1e-300)) / m);
  EwooState ewoo = make_ewoo(std::max(d_bound, 1e-12), std::pow(big_t, -0.25));
  const double fixed_eta = config.eta > 0.0 ? config.eta
                                            : std::sqrt(std::max(log_e, 1e-12) / m);
  Vec optimum_sum = Vec::Zero(ne);
  const Vec uniform = Vec::Constant(ne, 1.0 / ne);

  for (int t = 0; t < big_t; ++t) {
    const auto& row = script.types[t];
    if (static_cast<int>(row.size()) < m) {
      throw ConfigError("stackelberg: attacker script row shorter than the round count");
    }
    Vec init = uniform;
    double eta = fixed_eta;
    if (config.meta) {
      if (t > 0) init = offset_toward_uniform(Vec(optimum_sum / t), alpha);
      eta = ewoo_next_eta(ewoo);
    }

    Rng rng(derive_seed(config.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(t)));
    Vec cum = Vec::Zero(ne);
    Vec log_init(ne);
    for (int e = 0; e < ne; ++e) {
      log_init[e] = init[e] > 0.0 ? std::log(init[e]) : -std::numeric_limits<double>::infinity();
    }
    double expected = 0.0;
    double realized = 0.0;
    for (int i = 0; i < m; ++i) {
      const int f = row[i];
      if (f < 0 || f >= static_cast<int>(games[t].types.size())) {
        throw ConfigError("stackelberg: attacker type index out of range");
      }
      Vec logits = log_init + eta * cum;
      const double shift = logits.maxCoeff();
      Vec y = (logits.array() - shift).exp().matrix();
      y /= y.sum();
      const Vec u = point_utilities(games[t], f, points);
      expected += y.dot(u);
      realized += u[rng.categorical(y)];
      cum += u;
    }
    Eigen::Index best = 0;
    const double best_total = cum.maxCoeff(&best);

    StackelbergTaskRecord rec;
    rec.task = t;
    rec.eta = eta;
    rec.best_point = static_cast<int>(best);
    rec.expected_regret = best_total - expected;
    rec.realized_regret = best_total - realized;
    Vec one_hot = Vec::Zero(ne);
    one_hot[best] = 1.0;
    const Vec target = offset_toward_uniform(one_hot, alpha);
    const double kl = kl_divergence(target, init);
    rec.bound = eta * m + kl / eta + 2.0 * alpha * m;
    rec.init_entropy = entropy(init);
    rec.init_mass_on_best = init[best];
    run.tasks.push_back(rec);

    optimum_sum += one_hot;
    ewoo_observe(ewoo, kl / m, static_cast<double>(m));
    if (log_e > 0.0) {
      run.worst_constant =
          std::max(run.worst_constant, rec.expected_regret / std::sqrt(m * log_e));
    }
  }
  run.mean_optimum = optimum_sum / big_t;
  return run;
}

}  // namespace metagames
