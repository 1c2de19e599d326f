#include <doctest.h>

#include <cmath>

#include "metagames/metrics.h"
#include "metagames/swapregret.h"

namespace metagames {
namespace {

Vec v2(double a, double b) { return Vec{{a, b}}; }

NormalFormGame random_general_sum(Rng& rng, int d0, int d1) {
  std::vector<std::vector<double>> tables(2, std::vector<double>(d0 * d1));
  for (auto& t : tables)
    for (auto& v : t) v = rng.uniform(-1, 1);
  return NormalFormGame({d0, d1}, tables);
}

// Both players run swap wrappers against each other for m rounds.
std::vector<SwapWrapper> swap_self_play(const NormalFormGame& g, int m, double eta,
                                        std::vector<std::vector<Vec>>* trajectory = nullptr) {
  std::vector<SwapWrapper> w;
  for (int k = 0; k < 2; ++k) w.push_back(make_swap_wrapper(g.actions()[k], eta));
  for (int i = 0; i < m; ++i) {
    const std::vector<Vec> profile{w[0].mix, w[1].mix};
    if (trajectory) trajectory->push_back(profile);
    for (int k = 0; k < 2; ++k) swap_step(w[k], g.utility(k, profile));
  }
  return w;
}

TEST_CASE("stationary distribution examples") {
  CHECK((stationary_distribution(Mat{{0, 1}, {1, 0}}) - v2(0.5, 0.5)).norm() < 1e-12);
  CHECK((stationary_distribution(Mat{{1, 0}, {0, 1}}) - v2(0.5, 0.5)).norm() < 1e-12);
  const Vec pi = stationary_distribution(Mat{{0.9, 0.1}, {0.5, 0.5}});
  CHECK((pi - v2(5.0 / 6.0, 1.0 / 6.0)).norm() < 1e-10);
  CHECK(stationary_residual(Mat{{0.9, 0.1}, {0.5, 0.5}}, pi) <= 1e-8);
  CHECK_THROWS_AS(stationary_distribution(Mat{{0.9, 0.2}, {0.5, 0.5}}), InvalidInputError);
  CHECK_THROWS_AS(stationary_distribution(Mat{{1.5, -0.5}, {0.5, 0.5}}), InvalidInputError);
}

TEST_CASE("stationary distribution of random chains has small residual") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + rng.index(10);
    Mat q(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) q(r, c) = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
      if (q.row(r).sum() == 0.0) q(r, r) = 1.0;
      q.row(r) /= q.row(r).sum();
    }
    const Vec pi = stationary_distribution(q);
    CHECK(pi.minCoeff() >= 0.0);
    CHECK(pi.sum() == doctest::Approx(1.0));
    CHECK(stationary_residual(q, pi) <= 1e-8);
  }
}

TEST_CASE("single-action wrapper") {
  SwapWrapper w = make_swap_wrapper(1, 0.1);
  for (int i = 0; i < 5; ++i) swap_step(w, Vec{{0.7}});
  CHECK(w.mix[0] == 1.0);
  CHECK(swap_regret(w.plays, w.utilities) == 0.0);
}

TEST_CASE("zero utilities keep the mix constant") {
  SwapWrapper w = make_swap_wrapper(3, 0.05);
  const Vec start = w.mix;
  for (int i = 0; i < 20; ++i) swap_step(w, Vec::Zero(3));
  CHECK((w.mix - start).norm() < 1e-14);
  for (const auto& l : w.learners) CHECK((l.primary - l.init).norm() < 1e-14);
}

TEST_CASE("swap regret examples") {
  const std::vector<Vec> plays{v2(1, 0), v2(1, 0)};
  const std::vector<Vec> utils{v2(0, 1), v2(0, 1)};
  CHECK(swap_regret(plays, utils) == doctest::Approx(2.0));
  CHECK(swap_regret_enumerate(plays, utils) == doctest::Approx(2.0));
  CHECK(swap_regret({v2(0, 1), v2(0, 1)}, utils) == 0.0);
}

TEST_CASE("swap regret matches enumeration and dominates external regret") {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + rng.index(4);
    const int m = 1 + rng.index(30);
    std::vector<Vec> plays, utils;
    for (int i = 0; i < m; ++i) {
      Vec x(d), u(d);
      for (int j = 0; j < d; ++j) {
        x[j] = rng.uniform();
        u[j] = rng.uniform(-1, 1);
      }
      plays.push_back(x / x.sum());
      utils.push_back(u);
    }
    const double s = swap_regret(plays, utils);
    CHECK(s == doctest::Approx(swap_regret_enumerate(plays, utils)).epsilon(1e-12));
    CHECK(s >= external_regret(Simplex{d}, plays, utils).value - 1e-12);
  }
}

TEST_CASE("two-action wrapper: swap regret below summed per-action regret") {
  Rng rng(47);
  SwapWrapper w = make_swap_wrapper(2, 0.05);
  for (int i = 0; i < 200; ++i) swap_step(w, v2(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  CHECK(swap_regret(w.plays, w.utilities) <= per_action_regret_sum(w) + 1e-9);
  CHECK(w.max_stationary_residual <= 1e-8);
}

TEST_CASE("swap regret chain on random general-sum games") {
  Rng rng(53);
  const int m = 150;
  for (int trial = 0; trial < 100; ++trial) {
    const int d0 = 2 + rng.index(3);
    const int d1 = 2 + rng.index(3);
    const NormalFormGame g = random_general_sum(rng, d0, d1);
    const double eta = default_swap_eta(2, std::max(d0, d1), lipschitz_constant(g));
    const auto w = swap_self_play(g, m, eta);
    const double alpha = swap_offset_alpha(m, 1);
    for (const auto& wrapper : w) {
      const double swap = swap_regret(wrapper.plays, wrapper.utilities);
      const double per_action = per_action_regret_sum(wrapper);
      CHECK(swap <= per_action + 1e-9);
      CHECK(per_action_regret_sum(wrapper, alpha) <= swap_rvu_rhs(wrapper, alpha) + 1e-8);
      // Offsetting a comparator toward uniform moves each learner's regret by
      // at most 2 alpha m.
      for (const auto& l : wrapper.learners) {
        const int d = set_dim(l.set);
        const Vec opt = optimum_in_hindsight(l.set, l.cum_utility);
        const Vec shifted = (1.0 - alpha) * opt + alpha * Vec::Constant(d, 1.0 / d);
        const double change =
            std::abs(external_regret(l, opt).value - external_regret(l, shifted).value);
        CHECK(change <= 2.0 * alpha * m + 1e-12);
      }
    }
  }
}

TEST_CASE("correlated equilibrium gap shrinks as the horizon doubles") {
  Rng rng(59);
  for (int trial = 0; trial < 5; ++trial) {
    const NormalFormGame g = random_general_sum(rng, 3, 3);
    const double eta = default_swap_eta(2, 3, lipschitz_constant(g));
    double last = std::numeric_limits<double>::infinity();
    for (int m : {100, 200, 400}) {
      std::vector<std::vector<Vec>> trajectory;
      swap_self_play(g, m, eta, &trajectory);
      const auto gaps = cce_ce_gap(average_product_distribution(g, trajectory), g);
      CHECK(gaps.ce < last);
      CHECK(gaps.cce <= gaps.ce + 1e-12);
      last = gaps.ce;
    }
  }
}

TEST_CASE("swap configuration errors") {
  CHECK_THROWS_AS(make_swap_wrapper(0, 0.1), ConfigError);
  CHECK_THROWS_AS(make_swap_wrapper(2, 0.1, {v2(0.5, 0.5)}), ConfigError);
  CHECK_THROWS_AS(default_swap_eta(2, 2, 0.0), ConfigError);
  CHECK(swap_offset_alpha(8, 1) == doctest::Approx(0.5));
  SwapWrapper w = make_swap_wrapper(2, 0.1);
  CHECK_THROWS_AS(swap_step(w, Vec{{1.0}}), InvalidInputError);
}

}  // namespace
}  // namespace metagames
