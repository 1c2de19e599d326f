#include <doctest.h>

#include <cmath>

#include "metagames/geometry.h"

namespace metagames {
namespace {

Vec v2(double a, double b) { return Vec{{a, b}}; }

Vec random_point(Rng& rng, int d) {
  Vec x(d);
  for (int j = 0; j < d; ++j) x[j] = -std::log(1.0 - rng.uniform());
  return x / x.sum();
}

TEST_CASE("simplex projection examples") {
  Simplex s{2};
  CHECK((project_l2(s, v2(0.5, 0.5)) - v2(0.5, 0.5)).norm() < 1e-12);
  CHECK((project_l2(s, v2(1, 1)) - v2(0.5, 0.5)).norm() < 1e-12);
  CHECK((project_l2(s, v2(2, 0)) - v2(1, 0)).norm() < 1e-12);
}

TEST_CASE("simplex projection matches a grid search") {
  const Vec y = v2(2.0, 0.0);
  double best = 1e9;
  Vec arg;
  for (int i = 0; i <= 10000; ++i) {
    const Vec x = v2(i * 1e-4, 1.0 - i * 1e-4);
    if ((x - y).norm() < best) {
      best = (x - y).norm();
      arg = x;
    }
  }
  CHECK((project_l2(Simplex{2}, y) - arg).norm() < 1e-4);
}

TEST_CASE("projection rejects non-finite input") {
  CHECK_THROWS_AS(project_l2(Simplex{2}, v2(NAN, 0.0)), InvalidInputError);
}

TEST_CASE("projection is idempotent and optimal") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + rng.index(6);
    Vec y(d);
    for (int j = 0; j < d; ++j) y[j] = rng.uniform(-2.0, 2.0);
    const Simplex s{d};
    const Vec p = project_l2(s, y);
    CHECK(is_feasible(s, p, 1e-12));
    CHECK((project_l2(s, p) - p).norm() == 0.0);
    const Vec x = random_point(rng, d);
    CHECK((p - y).norm() <= (x - y).norm() + 1e-10);
  }
}

TEST_CASE("box projection clamps") {
  Box b{v2(0, 0), v2(1, 2)};
  CHECK((project_l2(b, v2(-1, 3)) - v2(0, 2)).norm() == 0.0);
}

TEST_CASE("bregman examples") {
  CHECK(bregman(Regularizer::kEuclidean, v2(0.3, 0.7), v2(0.3, 0.7)) == 0.0);
  CHECK(bregman(Regularizer::kEuclidean, v2(1, 0), v2(0, 1)) == doctest::Approx(1.0));
  const double kl = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(bregman(Regularizer::kEntropic, v2(0.5, 0.5), v2(0.25, 0.75)) ==
        doctest::Approx(kl).epsilon(1e-12));
  CHECK_THROWS_AS(bregman(Regularizer::kEntropic, v2(0.5, 0.5), v2(0.0, 1.0)), DomainError);
}

TEST_CASE("entropic divergence matches midpoint quadrature of its defining integral") {
  // KL(x||xp) = int_0^1 (1 - s) d^2/ds^2 R(xp + s (x - xp)) ds for R = sum x log x.
  const Vec x = v2(0.5, 0.5);
  const Vec xp = v2(0.25, 0.75);
  const Vec dir = x - xp;
  const int n = 20000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    const Vec p = xp + s * dir;
    total += (1.0 - s) * (dir.array().square() / p.array()).sum() / n;
  }
  CHECK(bregman(Regularizer::kEntropic, x, xp) == doctest::Approx(total).epsilon(1e-6));
}

TEST_CASE("prox step examples") {
  const Vec u = v2(0.5, 0.5);
  CHECK((prox_step(Regularizer::kEntropic, Simplex{2}, u, v2(0, 0), 0.7) - u).norm() < 1e-15);
  CHECK((prox_step(Regularizer::kEntropic, Simplex{2}, u, v2(1, 0), std::log(2.0)) -
         v2(2.0 / 3.0, 1.0 / 3.0))
            .norm() < 1e-12);
  CHECK((prox_step(Regularizer::kEuclidean, Simplex{2}, u, v2(1, -1), 0.25) - v2(0.75, 0.25))
            .norm() < 1e-12);
}

TEST_CASE("entropic prox equals the multiplicative-weights closed form") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + rng.index(8);
    const Vec a = random_point(rng, d);
    Vec g(d);
    for (int j = 0; j < d; ++j) g[j] = rng.uniform(-1, 1);
    const double eta = rng.uniform(0.01, 2.0);
    Vec w = (a.array() * (eta * g.array()).exp()).matrix();
    w /= w.sum();
    CHECK((prox_step(Regularizer::kEntropic, Simplex{d}, a, g, eta) - w).lpNorm<Eigen::Infinity>() <
          1e-12);
  }
}

TEST_CASE("prox steps satisfy the three-point inequality") {
  // For x+ = argmax <x, g> - D(x||a)/eta and any feasible x:
  //   eta <x - x+, g> <= D(x||a) - D(x||x+) - D(x+||a).
  Rng rng(13);
  for (Regularizer reg :
       {Regularizer::kEuclidean, Regularizer::kEntropic, Regularizer::kLogBarrier}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 2 + rng.index(5);
      const Vec a = random_point(rng, d);
      const Vec x = random_point(rng, d);
      Vec g(d);
      for (int j = 0; j < d; ++j) g[j] = rng.uniform(-1, 1);
      const double eta = rng.uniform(0.01, 1.0);
      const Vec xp = prox_step(reg, Simplex{d}, a, g, eta);
      const double lhs = eta * (x - xp).dot(g);
      const double rhs = bregman(reg, x, a) - bregman(reg, x, xp) - bregman(reg, xp, a);
      CHECK(lhs <= rhs + 1e-8);
    }
  }
}

TEST_CASE("log-barrier prox stays interior and is optimal along feasible directions") {
  Rng rng(17);
  const Vec a = random_point(rng, 4);
  const Vec g = Vec{{0.3, -0.2, 0.9, -1.0}};
  const Vec x = prox_step(Regularizer::kLogBarrier, Simplex{4}, a, g, 0.5);
  CHECK(x.minCoeff() > 0.0);
  auto objective = [&](const Vec& z) {
    return z.dot(g) - bregman(Regularizer::kLogBarrier, z, a) / 0.5;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const Vec z = 0.99 * x + 0.01 * random_point(rng, 4);
    CHECK(objective(z) <= objective(x) + 1e-10);
  }
}

TEST_CASE("set helpers") {
  CHECK(set_diameter(Simplex{5}) == doctest::Approx(std::sqrt(2.0)));
  CHECK((set_center(Simplex{4}) - Vec::Constant(4, 0.25)).norm() < 1e-15);
  CHECK(parse_regularizer(regularizer_name(Regularizer::kLogBarrier)) == Regularizer::kLogBarrier);
  CHECK_THROWS_AS(parse_regularizer("l3"), ConfigError);
  const Vec safe = interior_safeguard(v2(0.0, 1.0));
  CHECK(safe.minCoeff() > 0.0);
  CHECK(safe.sum() == doctest::Approx(1.0));
}

}  // namespace
}  // namespace metagames
