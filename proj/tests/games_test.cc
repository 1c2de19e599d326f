#include <doctest.h>

#include <cmath>

#include "metagames/games.h"

namespace metagames {
namespace {

Vec v2(double a, double b) { return Vec{{a, b}}; }

Vec random_point(Rng& rng, int d) {
  Vec x(d);
  for (int j = 0; j < d; ++j) x[j] = -std::log(1.0 - rng.uniform());
  return x / x.sum();
}

TEST_CASE("matrix game gradients") {
  MatrixGame g(Mat{{1, -1}, {-1, 1}});
  CHECK(utility_gradient(g, 0, {v2(0.5, 0.5), v2(0.5, 0.5)}).norm() == 0.0);
  CHECK((utility_gradient(g, 0, {v2(0.5, 0.5), v2(1, 0)}) - v2(-1, 1)).norm() == 0.0);
  CHECK((utility_gradient(g, 1, {v2(1, 0), v2(0.5, 0.5)}) - v2(1, -1)).norm() == 0.0);
  CHECK_THROWS_AS(utility_gradient(g, 2, {v2(1, 0), v2(1, 0)}), BoundsError);
}

TEST_CASE("normal-form identity game gradient is a tensor contraction") {
  NormalFormGame g({2, 2}, {{1, 0, 0, 1}, {1, 0, 0, 1}});
  CHECK((utility_gradient(g, 0, {v2(0.3, 0.7), v2(1, 0)}) - v2(1, 0)).norm() == 0.0);
  CHECK(g.expected_payoff(1, {v2(1, 0), v2(1, 0)}) == 1.0);
}

TEST_CASE("spectral norms") {
  CHECK(lipschitz_constant(MatrixGame(Mat::Identity(2, 2))) == doctest::Approx(1.0));
  CHECK(lipschitz_constant(MatrixGame(Mat{{2, 0}, {0, 1}})) == doctest::Approx(2.0));
  CHECK(lipschitz_constant(MatrixGame(Mat{{1, 1}, {1, 1}})) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("spectral norm is a Lipschitz constant for the utility map") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int dx = 2 + rng.index(4);
    const int dy = 2 + rng.index(4);
    Mat a(dx, dy);
    for (int i = 0; i < dx; ++i)
      for (int j = 0; j < dy; ++j) a(i, j) = rng.uniform(-1, 1);
    MatrixGame g(a);
    const double l = lipschitz_constant(g);
    for (int k = 0; k < 20; ++k) {
      const Vec y1 = random_point(rng, dy);
      const Vec y2 = random_point(rng, dy);
      const Vec x = random_point(rng, dx);
      CHECK((g.x_utility(y1) - g.x_utility(y2)).norm() <= l * (y1 - y2).norm() + 1e-9);
      CHECK((utility_gradient(g, 0, {x, y1}) - g.x_utility(y1)).norm() == 0.0);
    }
  }
}

TEST_CASE("lower bound family matches its definition") {
  CHECK((lower_bound_family(3, 2).a() - Mat{{0, 0, 0}, {1, 1, 1}, {0, 0, 0}}).norm() == 0.0);
  CHECK((lower_bound_family(1, 1).a() - Mat{{1}}).norm() == 0.0);
  CHECK((lower_bound_family(2, 1).a() - Mat{{1, 1}, {0, 0}}).norm() == 0.0);
  CHECK_THROWS(lower_bound_family(2, 3));
  // The column player's gradient does not depend on its own strategy.
  const MatrixGame g = lower_bound_family(3, 2);
  const Vec x = Vec{{0.2, 0.5, 0.3}};
  CHECK((utility_gradient(g, 1, {x, Vec::Constant(3, 1.0 / 3)}) -
         utility_gradient(g, 1, {x, Vec{{1, 0, 0}}}))
            .norm() == 0.0);
}

TEST_CASE("potential game partials reproduce utilities") {
  Rng rng(5);
  std::vector<double> table(12);
  for (auto& v : table) v = rng.uniform(-1, 1);
  const PotentialGame pg = identical_interest_game({2, 3, 2}, table);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec> profile{random_point(rng, 2), random_point(rng, 3), random_point(rng, 2)};
    for (int k = 0; k < 3; ++k) {
      const Vec u = pg.base.utility(k, profile);
      for (int a = 0; a < profile[k].size(); ++a) {
        auto plus = profile;
        auto minus = profile;
        plus[k][a] += h;
        minus[k][a] -= h;
        const double fd = (pg.potential(plus) - pg.potential(minus)) / (2 * h);
        CHECK(fd == doctest::Approx(u[a]).epsilon(1e-4).scale(1.0));
      }
    }
  }
}

TEST_CASE("game sequences") {
  SequenceConfig cfg;
  cfg.family = GameFamily::kLowerBoundPrior;
  cfg.prior = Vec{{1, 0, 0}};
  cfg.num_tasks = 5;
  auto seq = sample_game_sequence(cfg);
  REQUIRE(seq.size() == 5);
  for (const auto& g : seq.matrix_games) CHECK((g.a() - lower_bound_family(3, 1).a()).norm() == 0.0);

  SequenceConfig base;
  base.family = GameFamily::kPerturbedBase;
  base.base = Mat{{0.5, -0.5}, {-0.5, 0.5}};
  base.delta = 0.0;
  base.num_tasks = 3;
  seq = sample_game_sequence(base);
  for (const auto& g : seq.matrix_games) CHECK((g.a() - seq.matrix_games[0].a()).norm() == 0.0);

  cfg.prior = v2(0.5, 0.5);
  cfg.num_tasks = 10000;
  cfg.seed = 99;
  seq = sample_game_sequence(cfg);
  int ones = 0;
  for (int r : seq.rows) ones += r == 1;
  CHECK(std::abs(ones / 10000.0 - 0.5) < 0.02);
  CHECK_THROWS_AS(parse_family("galaxy"), ConfigError);
}

TEST_CASE("sorted sequencing orders tasks by key") {
  SequenceConfig cfg;
  cfg.family = GameFamily::kPerturbedBase;
  cfg.base = Mat{{0.5, -0.5}, {-0.5, 0.5}};
  cfg.delta = 0.1;
  cfg.num_tasks = 20;
  cfg.sequencing = Sequencing::kSorted;
  const auto seq = sample_game_sequence(cfg);
  for (int t = 1; t < seq.size(); ++t) CHECK(seq.keys[t - 1] <= seq.keys[t]);
}

TEST_CASE("ratio game operator") {
  const Mat r{{1, 0}, {0, 1}};
  const Mat s{{1, 1}, {1, 1}};
  CHECK(ratio_game_value(r, s, v2(0.5, 0.5), v2(0.5, 0.5)) == doctest::Approx(0.5));
  const VIOperator same = ratio_game_operator(s, s, 0.5);
  Vec z(4);
  z << 0.3, 0.7, 0.6, 0.4;
  CHECK(same.eval(z).norm() < 1e-15);
  CHECK_THROWS_AS(ratio_game_operator(r, Mat{{1, 0}, {1, 1}}, 0.1), InvalidInputError);

  Mat s2{{1.0, 0.8}, {0.6, 1.2}};
  const VIOperator op = ratio_game_operator(r, s2, 0.5);
  const Vec x = v2(0.3, 0.7);
  const Vec y = v2(0.6, 0.4);
  const Vec f = op.eval(z);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vec xp = x, xm = x, yp = y, ym = y;
    xp[j] += h;
    xm[j] -= h;
    yp[j] += h;
    ym[j] -= h;
    CHECK(f[j] == doctest::Approx((ratio_game_value(r, s2, xp, y) -
                                   ratio_game_value(r, s2, xm, y)) / (2 * h)).epsilon(1e-6));
    CHECK(f[2 + j] == doctest::Approx(-(ratio_game_value(r, s2, x, yp) -
                                        ratio_game_value(r, s2, x, ym)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("bilinear operator Lipschitz sample check") {
  Rng rng(21);
  Mat a(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = rng.uniform(-1, 1);
  const VIOperator op = bilinear_operator(MatrixGame(a));
  REQUIRE(op.lipschitz.has_value());
  for (int k = 0; k < 200; ++k) {
    Vec z1(7), z2(7);
    z1 << random_point(rng, 3), random_point(rng, 4);
    z2 << random_point(rng, 3), random_point(rng, 4);
    CHECK((op.eval(z1) - op.eval(z2)).norm() <= *op.lipschitz * (1 + 1e-6) * (z1 - z2).norm());
  }
}

}  // namespace
}  // namespace metagames
