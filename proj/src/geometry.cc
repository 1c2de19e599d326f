#include "metagames/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace metagames {
namespace {

constexpr double kInteriorFloor = 1e-15;
constexpr int kMaxBisection = 200;

void require_finite(const Vec& y, const char* what) {
  if (!y.allFinite()) {
    throw InvalidInputError(std::string(what) + ": non-finite input");
  }
}

// Log-barrier prox on the simplex. Stationarity gives
// x_j = 1 / (1/a_j - eta g_j + eta lambda); the sum is decreasing in lambda,
// so the normalization multiplier is found by bisection.
Vec log_barrier_prox(const Vec& anchor, const Vec& g, double eta) {
  const int d = static_cast<int>(anchor.size());
  Vec base(d);
  for (int j = 0; j < d; ++j) base[j] = 1.0 / anchor[j] - eta * g[j];
  auto mass = [&](double lambda) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += 1.0 / (base[j] + eta * lambda);
    return s;
  };
  // Every denominator must stay positive: lambda > max_j (-base_j / eta).
  double lo = -base.minCoeff() / eta;
  // Near lo the smallest denominator vanishes and the mass blows up, so lo is
  // a valid left bracket; grow the right bracket until the mass drops below 1.
  double width = 1.0;
  double hi = lo + width;
  while (mass(hi) > 1.0) {
    width *= 2.0;
    hi = lo + width;
    if (!std::isfinite(hi)) {
      throw NumericError("log-barrier prox: failed to bracket multiplier");
    }
  }
  double left = lo;
  double right = hi;
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (left + right);
    if (mid == left || mid == right) break;
    const double m = mass(mid);
    if (std::abs(m - 1.0) <= 1e-13) {
      left = right = mid;
      break;
    }
    if (m > 1.0) {
      left = mid;
    } else {
      right = mid;
    }
  }
  const double lambda = 0.5 * (left + right);
  Vec x(d);
  for (int j = 0; j < d; ++j) x[j] = 1.0 / (base[j] + eta * lambda);
  const double residual = std::abs(x.sum() - 1.0);
  if (!(residual <= 1e-10) || !x.allFinite() || x.minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "log-barrier prox: bisection did not converge (residual "
        << residual << ", eta " << eta << ", lambda " << lambda << ")";
    throw NumericError(msg.str());
  }
  return x / x.sum();
}

}  // namespace

const char* regularizer_name(Regularizer reg) {
  switch (reg) {
    case Regularizer::kEuclidean:
      return "euclidean";
    case Regularizer::kEntropic:
      return "entropic";
    case Regularizer::kLogBarrier:
      return "log-barrier";
  }
  return "unknown";
}

Regularizer parse_regularizer(const std::string& name) {
  if (name == "euclidean") return Regularizer::kEuclidean;
  if (name == "entropic") return Regularizer::kEntropic;
  if (name == "log-barrier") return Regularizer::kLogBarrier;
  throw ConfigError("unknown regularizer '" + name + "'");
}

int set_dim(const StrategySet& set) {
  if (const auto* s = std::get_if<Simplex>(&set)) return s->dim;
  return static_cast<int>(std::get<Box>(set).lower.size());
}

Vec set_center(const StrategySet& set) {
  if (const auto* s = std::get_if<Simplex>(&set)) {
    return Vec::Constant(s->dim, 1.0 / s->dim);
  }
  const auto& b = std::get<Box>(set);
  return 0.5 * (b.lower + b.upper);
}

double set_diameter(const StrategySet& set) {
  if (const auto* s = std::get_if<Simplex>(&set)) {
    return s->dim >= 2 ? std::sqrt(2.0) : 0.0;
  }
  const auto& b = std::get<Box>(set);
  return (b.upper - b.lower).norm();
}

bool is_feasible(const StrategySet& set, const Vec& x, double tol) {
  if (x.size() != set_dim(set) || !x.allFinite()) return false;
  if (std::holds_alternative<Simplex>(set)) {
    return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
  }
  const auto& b = std::get<Box>(set);
  return ((x - b.lower).array() >= -tol).all() &&
         ((b.upper - x).array() >= -tol).all();
}

Vec project_l2(const Simplex& set, const Vec& y) {
  require_finite(y, "project_l2");
  if (y.size() != set.dim) {
    throw InvalidInputError("project_l2: dimension mismatch");
  }
  // Points already on the simplex up to rounding are returned unchanged, which
  // makes the projection exactly idempotent.
  if (y.minCoeff() >= 0.0 &&
      std::abs(y.sum() - 1.0) <= 8.0 * std::numeric_limits<double>::epsilon() * set.dim) {
    return y;
  }
  // Sort-based projection: find the threshold tau with sum max(y - tau, 0) = 1.
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  for (int k = 0; k < set.dim; ++k) {
    css += u[k];
    const double candidate = (css - 1.0) / (k + 1);
    if (u[k] - candidate > 0.0) tau = candidate;
  }
  Vec x = (y.array() - tau).max(0.0).matrix();
  // Absorb rounding so that the coordinates sum to one within 1e-15.
  const double s = x.sum();
  if (s > 0.0) x /= s;
  return x;
}

Vec project_l2(const Box& set, const Vec& y) {
  require_finite(y, "project_l2");
  return y.cwiseMax(set.lower).cwiseMin(set.upper);
}

Vec project_l2(const StrategySet& set, const Vec& y) {
  return std::visit([&](const auto& s) { return project_l2(s, y); }, set);
}

Vec project_weighted_simplex(const Vec& y, const Vec& q) {
  require_finite(y, "project_weighted_simplex");
  if (q.size() != y.size() || !(q.array() > 0.0).all()) {
    throw ConfigError("weighted projection needs positive weights");
  }
  // x_j = max(0, y_j - tau / q_j) with tau chosen so that sum x_j = 1. The
  // sum is piecewise linear and nonincreasing in tau; solve exactly on the
  // active set identified by sorting breakpoints tau_j = q_j y_j.
  const int d = static_cast<int>(y.size());
  std::vector<int> order(d);
  for (int j = 0; j < d; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return q[a] * y[a] > q[b] * y[b];
  });
  double sum_y = 0.0;
  double sum_inv_q = 0.0;
  double tau = 0.0;
  for (int k = 0; k < d; ++k) {
    const int j = order[k];
    sum_y += y[j];
    sum_inv_q += 1.0 / q[j];
    const double candidate = (sum_y - 1.0) / sum_inv_q;
    if (q[j] * y[j] > candidate) tau = candidate;
  }
  Vec x(d);
  for (int j = 0; j < d; ++j) x[j] = std::max(0.0, y[j] - tau / q[j]);
  const double s = x.sum();
  if (s > 0.0) x /= s;
  return x;
}

Vec interior_safeguard(const Vec& x) {
  if (x.minCoeff() >= kInteriorFloor) return x;
  Vec lifted = x.cwiseMax(kInteriorFloor);
  return lifted / lifted.sum();
}

double bregman(Regularizer reg, const Vec& x, const Vec& xp) {
  if (x.size() != xp.size()) {
    throw InvalidInputError("bregman: dimension mismatch");
  }
  switch (reg) {
    case Regularizer::kEuclidean:
      return 0.5 * (x - xp).squaredNorm();
    case Regularizer::kEntropic: {
      if (xp.minCoeff() <= 0.0) {
        throw DomainError("bregman: entropic divergence needs interior xp");
      }
      double kl = 0.0;
      for (int j = 0; j < x.size(); ++j) {
        if (x[j] > 0.0) kl += x[j] * std::log(x[j] / xp[j]);
      }
      // Generalized KL for points off the simplex.
      kl += xp.sum() - x.sum();
      return std::max(kl, 0.0);
    }
    case Regularizer::kLogBarrier: {
      if (xp.minCoeff() <= 0.0 || x.minCoeff() <= 0.0) {
        throw DomainError("bregman: log-barrier divergence needs interior points");
      }
      double d = 0.0;
      for (int j = 0; j < x.size(); ++j) {
        const double r = x[j] / xp[j];
        d += r - std::log(r) - 1.0;
      }
      return std::max(d, 0.0);
    }
  }
  return 0.0;
}

Vec prox_step(Regularizer reg, const StrategySet& set, const Vec& anchor,
              const Vec& g, double eta) {
  if (!(eta > 0.0)) throw InvalidInputError("prox_step: eta must be positive");
  require_finite(g, "prox_step");
  if (reg == Regularizer::kEuclidean) {
    return project_l2(set, anchor + eta * g);
  }
  if (!std::holds_alternative<Simplex>(set)) {
    throw DomainError(std::string("prox_step: ") + regularizer_name(reg) +
                      " regularizer is defined on the simplex only");
  }
  const Vec a = interior_safeguard(anchor);
  if (reg == Regularizer::kEntropic) {
    // Shift by the max exponent for stability; the normalizer absorbs it.
    Vec logits = a.array().log().matrix() + eta * g;
    const double shift = logits.maxCoeff();
    Vec w = (logits.array() - shift).exp().matrix();
    return w / w.sum();
  }
  return log_barrier_prox(a, g, eta);
}

}  // namespace metagames
