#include <doctest.h>

#include <cmath>

#include "metagames/holder_vi.h"

namespace metagames {
namespace {

VIOperator identity_operator(int dim) {
  VIOperator op;
  op.dim = dim;
  op.eval = [](const Vec& z) { return z; };
  op.lipschitz = 1.0;
  return op;
}

double slope(double a, double b, double ma, double mb) { return std::log(b / a) / std::log(mb / ma); }

TEST_CASE("Hoelder learning rate") {
  const double g = 1.5 * std::cbrt(3.0);
  CHECK(holder_g(0.5) == doctest::Approx(g).epsilon(1e-14));
  CHECK(g == doctest::Approx(2.1634).epsilon(1e-4));
  const double eta = holder_eta(HolderSchedule{1.0, 0.5, 1.0, 1});
  CHECK(eta == doctest::Approx(std::pow(1.0 / g, 0.25)).epsilon(1e-14));
  CHECK(eta == doctest::Approx(0.8245).epsilon(1e-4));
  // Squared radius times four scales eta by 4^(1/4).
  CHECK(holder_eta(HolderSchedule{1.0, 0.5, 2.0, 1}) / eta ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // H enters as H^(2/(1-alpha)) inside the power (1-alpha)/2, i.e. as 1/H.
  CHECK(holder_eta(HolderSchedule{3.0, 0.5, 1.0, 1}) == doctest::Approx(eta / 3.0).epsilon(1e-14));
  CHECK(holder_eta(HolderSchedule{2.0, 1.0, 1.0, 100}) == 0.125);
  // The formula tends to 1 as alpha approaches 1.
  CHECK(holder_eta(HolderSchedule{1.0, 1.0 - 1e-9, 1.0, 1}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(holder_eta(HolderSchedule{1.0, 0.0, 1.0, 1}), ConfigError);
  CHECK_THROWS_AS(holder_eta(HolderSchedule{-1.0, 0.5, 1.0, 1}), ConfigError);
  CHECK_THROWS_AS(holder_eta(HolderSchedule{1.0, 0.5, 0.0, 1}), ConfigError);
}

TEST_CASE("weak MVI runs on trivial operators") {
  VIOperator zero;
  zero.dim = 2;
  zero.eval = [](const Vec& z) { return Vec(Vec::Zero(z.size())); };
  const auto r = weak_mvi_run(zero, 0.0, 1.0, Vec{{0.3, -0.2}}, Vec{{0.3, -0.2}}, 50, 0.2);
  for (double n : r.norms) CHECK(n == 0.0);

  const auto id = weak_mvi_run(identity_operator(3), 0.0, 1.0, Vec{{1, -2, 0.5}}, Vec::Zero(3),
                               200, 0.2);
  CHECK(id.min_norm <= id.per_iterate_bound);
  CHECK(id.slack >= 0.0);
}

TEST_CASE("weak MVI bound on the plain rotation") {
  const Vec c{{0.4, -0.1}};
  const VIOperator rot = rotation_operator(1, 1.0, c);
  const Vec z0{{1.0, 1.0}};
  const auto r = weak_mvi_run(rot, 0.0, 1.0, z0, c, 500, 0.2);
  CHECK(r.lhs <= 2.0 / (0.2 * 0.2) * (c - z0).squaredNorm() + 1e-9);
  CHECK(r.slack >= -1e-9);
}

TEST_CASE("damped rotation satisfies weak MVI and the displayed bound") {
  const double gamma = 0.005;
  const double scale = 1.0 / std::sqrt(1.0 + gamma * gamma);
  const Vec c{{0.2, 0.3}};
  const VIOperator op = damped_rotation_operator(scale, gamma, c);
  const double rho = damped_rotation_rho(scale, gamma);
  CHECK(*op.lipschitz == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho == doctest::Approx(2.0 * gamma / std::sqrt(1.0 + gamma * gamma)));
  CHECK(rho < 0.0101);

  Rng rng(401);
  for (int k = 0; k < 1000; ++k) {
    const Vec z{{rng.uniform(-5, 5), rng.uniform(-5, 5)}};
    const Vec f = op.eval(z);
    CHECK(f.dot(z - c) >= -0.5 * rho * f.squaredNorm() - 1e-12);
    const Vec z2{{rng.uniform(-5, 5), rng.uniform(-5, 5)}};
    CHECK((op.eval(z2) - f).norm() <= *op.lipschitz * (z2 - z).norm() * (1 + 1e-12));
  }
  // Strictly weak: the monotonicity inner product is negative away from c.
  CHECK(op.eval(Vec{{1.2, 0.3}}).dot(Vec{{1.0, 0.0}}) < 0.0);

  const auto r = weak_mvi_run(op, rho, 1.0, Vec{{1.0, -1.0}}, c, 1000, 0.2);
  CHECK(r.lhs <= r.rhs + 1e-6);
  CHECK(r.min_norm <= r.per_iterate_bound);
}

TEST_CASE("weak MVI learning-rate band is enforced") {
  const VIOperator id = identity_operator(2);
  const Vec z = Vec::Zero(2);
  CHECK_THROWS_AS(weak_mvi_run(id, 0.1, 1.0, z, z, 10, 0.2), ConfigError);
  CHECK_THROWS_AS(weak_mvi_run(id, 0.0, 1.0, z, z, 10, 0.25), ConfigError);
  CHECK_THROWS_AS(weak_mvi_run(id, 0.0, 1.0, z, z, 10, 0.0), ConfigError);
  CHECK_THROWS_AS(weak_mvi_run(rotation_operator(1, 1.0, z, 1.0), 0.0, 1.0, z, z, 10, 0.2),
                  ConfigError);
}

TEST_CASE("sign-power operators have the advertised Hoelder constant") {
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    for (int dim : {1, 2, 5}) {
      const Vec c = Vec::Constant(dim, 0.1);
      const VIOperator op = sign_power_operator(dim, 1.5, alpha, c, -1.0, 1.0);
      const double est = estimate_holder_constant(op, alpha, -1.0, 1.0, 20000, 7);
      CHECK(est <= sign_power_holder_constant(dim, 1.5, alpha) * (1 + 1e-9));
      CHECK(*op.holder_h == doctest::Approx(sign_power_holder_constant(dim, 1.5, alpha)));
      // One dimension with points straddling the center attains 2^(1-alpha) H.
      if (dim == 1) CHECK(est >= 0.9 * 1.5 * std::pow(2.0, 1 - alpha));
    }
  }
  CHECK_THROWS_AS(sign_power_operator(2, 1.0, 1.5, Vec::Zero(2), -1, 1), ConfigError);
}

TEST_CASE("refined path length under the Hoelder schedule") {
  for (double alpha : {0.3, 0.5, 0.8}) {
    for (int m : {10, 100, 1000}) {
      const Vec c = Vec::Constant(3, 0.3);
      const VIOperator op = sign_power_operator(3, 1.0, alpha, c, -1.0, 1.0);
      const Vec z0 = Vec::Constant(3, -1.0);
      const double r = (c - z0).norm();
      const VIRun run = run_ogd_vi(op, z0, m, holder_eta(HolderSchedule{*op.holder_h, alpha, r, m}));
      CHECK(run.refined_path <= 2.0 * r * r + 1e-6);
      CHECK(run.primaries.size() == static_cast<std::size_t>(m + 1));
    }
  }
}

TEST_CASE("best-iterate residual decays at the Hoelder rate") {
  const double ms[3] = {100, 1000, 10000};
  double res[3];
  for (int k = 0; k < 3; ++k) {
    const int m = static_cast<int>(ms[k]);
    const Vec c = Vec::Constant(2, 0.3);
    const VIOperator op = sign_power_operator(2, 1.0, 0.5, c, -1.0, 1.0);
    const Vec z0 = Vec::Constant(2, -1.0);
    res[k] = run_ogd_vi(op, z0, m, holder_eta(HolderSchedule{*op.holder_h, 0.5, (c - z0).norm(), m}))
                 .best_residual;
  }
  CHECK(std::abs(slope(res[0], res[1], ms[0], ms[1]) + 0.25) <= 0.15);
  CHECK(std::abs(slope(res[0], res[2], ms[0], ms[2]) + 0.25) <= 0.15);

  for (int k = 0; k < 3; ++k) {
    const int m = static_cast<int>(ms[k]);
    const VIOperator op = horizon_rotation_operator(m, 1.0, Vec::Constant(2, 0.3), 1.0);
    CHECK(*op.lipschitz <= 1.0);
    res[k] = run_ogd_vi(op, Vec::Zero(2), m, 0.25).best_residual;
  }
  CHECK(std::abs(slope(res[0], res[2], ms[0], ms[2]) + 0.5) <= 0.15);
}

TEST_CASE("optimistic VI run on a constrained rotation stays feasible") {
  const VIOperator op = rotation_operator(2, 1.0, Vec::Zero(4), 0.5);
  const VIRun run = run_ogd_vi(op, Vec::Constant(4, 0.5), 100, 0.2, VIPrediction::kRecency);
  for (const auto& z : run.primaries) CHECK(z.lpNorm<Eigen::Infinity>() <= 0.5 + 1e-15);
  CHECK(run.best_residual >= 0.0);
  CHECK(run.best_index >= 0);
}

}  // namespace
}  // namespace metagames
