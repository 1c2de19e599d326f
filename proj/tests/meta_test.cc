#include <doctest.h>

#include <cmath>

#include "metagames/meta.h"
#include "metagames/metrics.h"

namespace metagames {
namespace {

Vec v2(double a, double b) { return Vec{{a, b}}; }

Vec random_point(Rng& rng, int d) {
  Vec x(d);
  for (int j = 0; j < d; ++j) x[j] = -std::log(1.0 - rng.uniform());
  return x / x.sum();
}

TEST_CASE("initializer modes") {
  Initializer ftl = make_initializer(InitMode::kFtlAverage, {Simplex{2}});
  CHECK((current_initialization(ftl)[0] - v2(0.5, 0.5)).norm() == 0.0);
  next_initialization(ftl, TaskOutcome{{v2(1, 0)}, {}, {}});
  CHECK((current_initialization(ftl)[0] - v2(1, 0)).norm() == 0.0);
  const auto after = next_initialization(ftl, TaskOutcome{{v2(0, 1)}, {}, {}});
  CHECK((after[0] - v2(0.5, 0.5)).norm() < 1e-15);

  const Initializer cold = make_initializer(InitMode::kCold, {Simplex{3}});
  CHECK((current_initialization(cold)[0] - Vec::Constant(3, 1.0 / 3)).norm() < 1e-15);

  Initializer last = make_initializer(InitMode::kLastIterate, {Simplex{2}});
  next_initialization(last, TaskOutcome{{v2(1, 0)}, {v2(0.3, 0.7)}, {}});
  CHECK((current_initialization(last)[0] - v2(0.3, 0.7)).norm() == 0.0);

  Initializer prev = make_initializer(InitMode::kPrevOptimum, {Simplex{2}});
  next_initialization(prev, TaskOutcome{{v2(1, 0)}, {v2(0.3, 0.7)}, {}});
  next_initialization(prev, TaskOutcome{{v2(0, 1)}, {v2(0.3, 0.7)}, {}});
  CHECK((current_initialization(prev)[0] - v2(0, 1)).norm() == 0.0);

  const Initializer custom =
      make_initializer(InitMode::kCustomAnchor, {Simplex{2}}, {v2(0.9, 0.1)});
  CHECK((current_initialization(custom)[0] - v2(0.9, 0.1)).norm() == 0.0);
  CHECK_THROWS_AS(make_initializer(InitMode::kCustomAnchor, {Simplex{2}}, {v2(0.9, 0.9)}),
                  ConfigError);

  CHECK(parse_init_mode(init_mode_name(InitMode::kNeAverage)) == InitMode::kNeAverage);
  CHECK_THROWS_AS(parse_init_mode("warm-ish"), ConfigError);
}

TEST_CASE("equilibrium averaging over identical matching-pennies tasks") {
  const MatrixGame mp = matching_pennies();
  Initializer init = make_initializer(InitMode::kNeAverage, {Simplex{2}, Simplex{2}});
  for (int t = 0; t < 5; ++t) {
    const NashSolution ne = solve_nash_lp(mp);
    const auto next = next_initialization(init, TaskOutcome{{}, {}, {ne.x, ne.y}});
    for (const auto& x : next) CHECK((x - v2(0.5, 0.5)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(next_initialization(init, TaskOutcome{{v2(1, 0), v2(1, 0)}, {}, {}}),
                  ConfigError);
}

TEST_CASE("averaging initializer tracks the exact running mean") {
  Rng rng(61);
  Initializer init = make_initializer(InitMode::kFtlAverage, {Simplex{4}});
  Vec sum = Vec::Zero(4);
  for (int t = 1; t <= 100; ++t) {
    const Vec a = random_point(rng, 4);
    sum += a;
    const auto next = next_initialization(init, TaskOutcome{{a}, {}, {}});
    CHECK((next[0] - sum / t).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK(is_feasible(Simplex{4}, next[0], 1e-12));
  }
}

TEST_CASE("follow-the-leader regret on Bregman losses") {
  Rng rng(67);
  const double omega2 = 2.0;  // squared l2 diameter of the simplex
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + rng.index(6);
    const int t_max = 5 + rng.index(200);
    Initializer init = make_initializer(InitMode::kFtlAverage, {Simplex{d}});
    std::vector<Vec> anchors;
    double incurred = 0.0;
    for (int t = 0; t < t_max; ++t) {
      const Vec a = rng.uniform() < 0.5 ? Vec(Vec::Unit(d, rng.index(d))) : random_point(rng, d);
      incurred += bregman(Regularizer::kEuclidean, a, current_initialization(init)[0]);
      anchors.push_back(a);
      next_initialization(init, TaskOutcome{{a}, {}, {}});
    }
    // The best fixed initialization is the mean, with total loss T/2 * variance.
    const double best = 0.5 * t_max * task_variance(anchors);
    CHECK(incurred - best <= 2.0 * omega2 * (1.0 + std::log(t_max)) + 1e-9);
  }
}

TEST_CASE("offset toward uniform") {
  CHECK((offset_toward_uniform(v2(1, 0), 0.2) - v2(0.9, 0.1)).norm() < 1e-15);
}

TEST_CASE("learning-rate posterior without observations is the interval midpoint") {
  const EwooState s = make_ewoo_interval(0.1, 2.0, 3.0);
  CHECK(ewoo_next_eta(s) == doctest::Approx(1.05));
  const EwooState t = make_ewoo(1.0, 0.5);
  CHECK(t.lo == doctest::Approx(0.5));
  CHECK(t.hi == doctest::Approx(std::sqrt(1.25)));
  CHECK(t.eps2 == doctest::Approx(0.25));
  CHECK(t.beta == doctest::Approx(0.5));
}

double grid_argmin(const std::function<double(double)>& f, double lo, double hi) {
  double best = f(lo);
  double arg = lo;
  for (double eta = lo; eta <= hi; eta += 1e-5) {
    if (f(eta) < best) {
      best = f(eta);
      arg = eta;
    }
  }
  return arg;
}

TEST_CASE("sharp posterior concentrates at the loss minimizer") {
  EwooState s = make_ewoo_interval(0.1, 2.0, 1e5);
  ewoo_observe(s, 0.25, 1.0);
  const double oracle = grid_argmin([](double e) { return e + 0.25 / e; }, 0.1, 2.0);
  CHECK(oracle == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(ewoo_next_eta(s) == doctest::Approx(oracle).epsilon(2e-3));
}

TEST_CASE("zero deviations push the learning rate to the lower end") {
  EwooState s = make_ewoo(1.0, 0.5);
  for (int t = 0; t < 2000; ++t) ewoo_observe(s, 0.0, 1.0);
  const double oracle =
      grid_argmin([&](double e) { return ewoo_cumulative_loss(s, e); }, s.lo, s.hi);
  CHECK(oracle == doctest::Approx(std::max(s.lo, 0.5)).epsilon(1e-4));
  CHECK(std::abs(ewoo_next_eta(s) - oracle) < 0.03);
}

TEST_CASE("learning-rate meta-learner regret stays within its bound") {
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const double d = rng.uniform(0.5, 2.0);
    const double rho = rng.uniform(0.2, 0.8);
    EwooState s = make_ewoo(d, rho);
    const int t_max = 40;
    std::vector<double> b2s, gammas, etas;
    for (int t = 0; t < t_max; ++t) {
      const double eta = ewoo_next_eta(s);
      CHECK(eta >= s.lo);
      CHECK(eta <= s.hi);
      const double b2 = std::pow(rng.uniform(0.3, 0.7) * d, 2);
      const double gamma = rng.uniform(0.2, 1.0);
      etas.push_back(eta);
      b2s.push_back(b2);
      gammas.push_back(gamma);
      ewoo_observe(s, b2, gamma);
    }
    double incurred = 0.0;
    double sg = 0.0;
    double sb = 0.0;
    for (int t = 0; t < t_max; ++t) {
      incurred += ewoo_task_loss(b2s[t], gammas[t], etas[t]);
      sg += gammas[t];
      sb += gammas[t] * b2s[t];
    }
    for (double eta_star : {std::sqrt(sb / sg), 0.5 * s.lo, s.hi, 2.0 * s.hi}) {
      double comparator = 0.0;
      for (int t = 0; t < t_max; ++t) comparator += ewoo_task_loss(b2s[t], gammas[t], eta_star);
      CHECK(incurred - comparator <= ewoo_regret_bound(s, eta_star) + 1e-9);
    }
  }
}

TEST_CASE("adaptive quadrature") {
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-11));
  CHECK_THROWS_AS(adaptive_simpson([](double x) { return std::sin(1.0 / x); }, 1e-12, 1.0,
                                   1e-14, 6),
                  NumericError);
}

TEST_CASE("similarity statistics") {
  CHECK(task_variance({v2(0.3, 0.7), v2(0.3, 0.7), v2(0.3, 0.7)}) == 0.0);
  CHECK(task_variance({v2(1, 0), v2(0, 1)}) == doctest::Approx(0.5));
  CHECK(kl_similarity({v2(0.3, 0.7), v2(0.3, 0.7)}) == doctest::Approx(0.0));
  CHECK(kl_similarity({v2(1, 0), v2(0, 1)}) == doctest::Approx(std::log(2.0)));
  CHECK(entropy(Vec::Unit(4, 2)) == 0.0);
  CHECK(entropy(Vec::Constant(4, 0.25)) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("entropy never exceeds the log of the support size") {
  Rng rng(73);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 2 + rng.index(30);
    const Vec p = random_point(rng, d);
    CHECK(entropy(p) < std::log(static_cast<double>(d)));
  }
}

TEST_CASE("potential deviation") {
  const std::vector<double> table{1.0, 0.0, 0.2, 0.5};
  const PotentialGame a = identical_interest_game({2, 2}, table);
  std::vector<double> shifted = table;
  for (auto& v : shifted) v -= 0.3;
  const PotentialGame b = identical_interest_game({2, 2}, shifted);
  CHECK(potential_difference(a, a) == 0.0);
  CHECK(potential_difference(a, b) == doctest::Approx(0.3));
  CHECK(v_diff({a, b, a}) == doctest::Approx((0.3 - 0.3) / 3.0).scale(1.0));
  CHECK(v_diff({a, b, b}) == doctest::Approx(0.3 / 3.0));

  // The pure-profile enumeration is the exact maximum over mixed profiles.
  Rng rng(79);
  std::vector<double> t1(8), t2(8);
  for (auto& v : t1) v = rng.uniform(-1, 1);
  for (auto& v : t2) v = rng.uniform(-1, 1);
  const PotentialGame p1 = identical_interest_game({2, 2, 2}, t1);
  const PotentialGame p2 = identical_interest_game({2, 2, 2}, t2);
  const double exact = potential_difference(p1, p2);
  for (int k = 0; k < 2000; ++k) {
    const std::vector<Vec> prof{random_point(rng, 2), random_point(rng, 2), random_point(rng, 2)};
    CHECK(p1.potential(prof) - p2.potential(prof) <= exact + 1e-12);
  }
}

TEST_CASE("best-case equilibrium variance never exceeds the worst case") {
  Rng rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<MatrixGame> games;
    std::vector<double> values;
    std::vector<Vec> joint;
    for (int t = 0; t < 6; ++t) {
      Mat a(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = rng.uniform(-1, 1);
      games.emplace_back(a);
      const NashSolution ne = solve_nash_lp(games.back());
      values.push_back(ne.value);
      Vec z(6);
      z << ne.x, ne.y;
      joint.push_back(z);
    }
    const double worst = ne_variance(joint);
    const auto best = ne_variance_best(games, values, 2000, 1e-13);
    CHECK(best.value <= worst + 1e-9);
    // Generic games have a unique equilibrium, so both selections agree.
    CHECK(best.value == doctest::Approx(worst).epsilon(1e-5).scale(1e-3));
  }
}

TEST_CASE("best-case equilibrium variance exploits degenerate equilibrium sets") {
  // Every strategy profile is an equilibrium of the zero game.
  std::vector<MatrixGame> games{MatrixGame(Mat::Zero(2, 2)), MatrixGame(Mat::Zero(2, 2))};
  const auto best = ne_variance_best(games, {0.0, 0.0});
  CHECK(best.value == doctest::Approx(0.0).scale(1.0));
  Vec z1(4), z2(4);
  z1 << 1, 0, 1, 0;
  z2 << 0, 1, 0, 1;
  CHECK(ne_variance({z1, z2}) == doctest::Approx(1.0));
}

}  // namespace
}  // namespace metagames
