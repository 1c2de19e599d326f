#include "metagames/holder_vi.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metagames/metrics.h"

namespace metagames {

namespace {

Vec project_domain(const VIOperator& op, const Vec& z) {
  return op.blocks.empty() ? z : project_product(op.blocks, z);
}

Vec eval_checked(const VIOperator& op, const Vec& z) {
  Vec f = op.eval(z);
  if (!all_finite(f)) throw NumericError("operator returned non-finite values");
  return f;
}

double signed_power(double v, double alpha) {
  return (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0)) * std::pow(std::abs(v), alpha);
}

}  // namespace

double holder_g(double alpha) {
  return (1.0 + alpha) * std::pow(2.0 + 2.0 * alpha, (1.0 - alpha) / (1.0 + alpha));
}

double holder_eta(const HolderSchedule& s) {
  if (!(s.alpha > 0.0) || s.alpha > 1.0) throw ConfigError("holder: alpha must lie in (0, 1]");
  if (!(s.h > 0.0)) throw ConfigError("holder: H must be positive");
  if (!(s.radius_bound > 0.0)) throw ConfigError("holder: radius bound must be positive");
  if (s.horizon < 1) throw ConfigError("holder: horizon must be >= 1");
  if (s.alpha == 1.0) return 1.0 / (4.0 * s.h);
  const double e = 1.0 - s.alpha;
  const double denom = s.horizon * std::pow(s.h, 2.0 / e) * holder_g(s.alpha);
  return std::pow(s.radius_bound * s.radius_bound / denom, e / 2.0);
}

VIRun run_ogd_vi(const VIOperator& op, const Vec& init, int m, double eta,
                 VIPrediction prediction) {
  if (m < 1) throw ConfigError("run_ogd_vi: m must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("run_ogd_vi: eta must be positive");
  if (init.size() != op.dim) throw InvalidInputError("run_ogd_vi: init has wrong dimension");
  VIRun run;
  const Vec z0 = project_domain(op, init);
  run.primaries.push_back(z0);
  run.secondaries.push_back(z0);
  Vec last_f = eval_checked(op, z0);
  auto residual = [&](const Vec& z, const Vec& f) {
    return op.blocks.empty() ? f.norm() : svi_residual(op, z);
  };
  run.best_residual = residual(z0, last_f);
  run.best_index = 0;
  for (int i = 1; i <= m; ++i) {
    const Vec& anchor = run.secondaries.back();
    const Vec pred =
        prediction == VIPrediction::kSecondary ? eval_checked(op, anchor) : last_f;
    Vec z = project_domain(op, anchor - eta * pred);
    Vec fz = eval_checked(op, z);
    Vec zh = project_domain(op, anchor - eta * fz);
    run.refined_path += (z - zh).squaredNorm() + (z - anchor).squaredNorm();
    const double r = residual(z, fz);
    if (r < run.best_residual) {
      run.best_residual = r;
      run.best_index = i;
    }
    run.primaries.push_back(std::move(z));
    run.secondaries.push_back(std::move(zh));
    last_f = std::move(fz);
  }
  return run;
}

WeakMviResult weak_mvi_run(const VIOperator& op, double rho, double lipschitz,
                           const Vec& z0, const Vec& z_star, int m, double eta) {
  if (!op.blocks.empty()) throw ConfigError("weak MVI run needs an unconstrained operator");
  if (m < 1) throw ConfigError("weak MVI run: m must be >= 1");
  if (rho < 0.0) throw ConfigError("weak MVI run: rho must be nonnegative");
  const double upper = lipschitz > 0.0 ? 1.0 / (4.0 * lipschitz)
                                       : std::numeric_limits<double>::infinity();
  if (!(eta > 2.0 * rho) || !(eta < upper)) {
    throw ConfigError("weak MVI run: eta must lie strictly between 2 rho and 1/(4L)");
  }
  if (z0.size() != op.dim || z_star.size() != op.dim) {
    throw InvalidInputError("weak MVI run: point has wrong dimension");
  }
  WeakMviResult res;
  res.trajectory.push_back(z0);
  Vec f_prev = eval_checked(op, z0);
  res.norms.push_back(f_prev.norm());
  Vec zh = z0;
  for (int i = 1; i <= m; ++i) {
    Vec z = zh - eta * f_prev;
    Vec fz = eval_checked(op, z);
    zh -= eta * fz;
    res.norms.push_back(fz.norm());
    res.trajectory.push_back(std::move(z));
    f_prev = std::move(fz);
  }
  res.min_norm = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= m - 1; ++i) {
    res.lhs += res.norms[i] * res.norms[i];
    if (res.norms[i] < res.min_norm) {
      res.min_norm = res.norms[i];
      res.min_index = i;
    }
  }
  if (m < 2) {
    res.min_index = 0;
    res.min_norm = res.norms[0];
  }
  const double r2 = (z_star - z0).squaredNorm();
  const double fm = res.norms[m];
  res.rhs = 2.0 / (eta * (eta - 2.0 * rho)) * r2 + 2.0 * rho / (eta - 2.0 * rho) * fm * fm;
  res.per_iterate_bound = m >= 2 ? std::sqrt(res.rhs / (m - 1)) : res.rhs;
  res.slack = res.rhs - res.lhs;
  return res;
}

VIOperator sign_power_operator(int dim, double h, double alpha, const Vec& center,
                               double lo, double hi) {
  if (dim < 1 || center.size() != dim) throw ConfigError("sign_power: bad dimension");
  if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("sign_power: alpha must lie in (0, 1]");
  if (!(hi > lo)) throw ConfigError("sign_power: need lo < hi");
  VIOperator op;
  op.dim = dim;
  op.eval = [h, alpha, center](const Vec& z) {
    Vec f(z.size());
    for (int j = 0; j < z.size(); ++j) f[j] = h * signed_power(z[j] - center[j], alpha);
    return f;
  };
  op.blocks.push_back(Box{Vec::Constant(dim, lo), Vec::Constant(dim, hi)});
  op.holder_h = sign_power_holder_constant(dim, h, alpha);
  op.holder_alpha = alpha;
  if (alpha == 1.0) op.lipschitz = h;
  return op;
}

double sign_power_holder_constant(int dim, double h, double alpha) {
  return h * std::pow(2.0, 1.0 - alpha) * std::pow(static_cast<double>(dim), (1.0 - alpha) / 2.0);
}

double estimate_holder_constant(const VIOperator& op, double alpha, double lo, double hi,
                                int samples, std::uint64_t seed) {
  Rng rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec a(op.dim);
    Vec b(op.dim);
    for (int j = 0; j < op.dim; ++j) {
      a[j] = rng.uniform(lo, hi);
      // Half the pairs are close, which is where the exponent bites.
      b[j] = s % 2 == 0 ? rng.uniform(lo, hi) : a[j] + 1e-3 * (rng.uniform() - 0.5);
    }
    const double dist = (a - b).norm();
    if (dist == 0.0) continue;
    best = std::max(best, (op.eval(a) - op.eval(b)).norm() / std::pow(dist, alpha));
  }
  return best;
}

VIOperator rotation_operator(int pairs, double scale, const Vec& center,
                             std::optional<double> box_radius) {
  if (pairs < 1 || center.size() != 2 * pairs) throw ConfigError("rotation: bad dimension");
  VIOperator op;
  op.dim = 2 * pairs;
  op.eval = [scale, center](const Vec& z) {
    Vec f(z.size());
    for (int p = 0; p < z.size() / 2; ++p) {
      f[2 * p] = scale * (z[2 * p + 1] - center[2 * p + 1]);
      f[2 * p + 1] = -scale * (z[2 * p] - center[2 * p]);
    }
    return f;
  };
  if (box_radius) {
    op.blocks.push_back(Box{center.array() - *box_radius, center.array() + *box_radius});
  }
  op.lipschitz = std::abs(scale);
  op.holder_h = std::abs(scale);
  op.holder_alpha = 1.0;
  op.weak_mvi_rho = 0.0;
  return op;
}

VIOperator horizon_rotation_operator(int horizon, double lipschitz, const Vec& center,
                                     double box_radius) {
  if (horizon < 1 || !(lipschitz > 0.0) || !(box_radius > 0.0)) {
    throw ConfigError("horizon rotation: need horizon >= 1, L > 0 and a positive box radius");
  }
  const double scale = std::min(1.0, 2.0 / std::sqrt(static_cast<double>(horizon))) * lipschitz;
  return rotation_operator(static_cast<int>(center.size()) / 2, scale, center, box_radius);
}

VIOperator damped_rotation_operator(double scale, double gamma, const Vec& center) {
  if (!(scale > 0.0) || gamma < 0.0 || center.size() != 2) {
    throw ConfigError("damped rotation: need scale > 0, gamma >= 0 and a 2-d center");
  }
  VIOperator op;
  op.dim = 2;
  op.eval = [scale, gamma, center](const Vec& z) {
    const Vec w = z - center;
    Vec f(2);
    f[0] = scale * (w[1] - gamma * w[0]);
    f[1] = scale * (-w[0] - gamma * w[1]);
    return f;
  };
  op.lipschitz = scale * std::sqrt(1.0 + gamma * gamma);
  op.weak_mvi_rho = damped_rotation_rho(scale, gamma);
  return op;
}

double damped_rotation_rho(double scale, double gamma) {
  return 2.0 * gamma / (scale * (1.0 + gamma * gamma));
}

}  // namespace metagames
