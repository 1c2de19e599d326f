#include "metagames/games.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace metagames {

MatrixGame::MatrixGame(Mat a, Orientation orientation)
    : a_(std::move(a)), orientation_(orientation) {
  if (!a_.allFinite()) throw InvalidInputError("MatrixGame: non-finite entry");
  if (a_.rows() == 0 || a_.cols() == 0) {
    throw InvalidInputError("MatrixGame: empty matrix");
  }
}

Vec MatrixGame::x_utility(const Vec& y) const {
  return orientation_ == Orientation::kRowMinimizer ? Vec(-(a_ * y))
                                                    : Vec(a_ * y);
}

Vec MatrixGame::y_utility(const Vec& x) const {
  return orientation_ == Orientation::kRowMinimizer
             ? Vec(a_.transpose() * x)
             : Vec(-(a_.transpose() * x));
}

Mat MatrixGame::loss_matrix() const {
  return orientation_ == Orientation::kRowMinimizer ? a_ : Mat(-a_);
}

NormalFormGame::NormalFormGame(std::vector<int> actions,
                               std::vector<std::vector<double>> payoffs)
    : actions_(std::move(actions)), payoffs_(std::move(payoffs)) {
  if (actions_.empty()) throw InvalidInputError("NormalFormGame: no players");
  if (payoffs_.size() != actions_.size()) {
    throw InvalidInputError("NormalFormGame: one payoff tensor per player");
  }
  const int n = num_players();
  strides_.assign(n, 1);
  for (int k = n - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * actions_[k + 1];
  num_profiles_ = strides_[0] * actions_[0];
  for (const auto& table : payoffs_) {
    if (static_cast<int>(table.size()) != num_profiles_) {
      throw InvalidInputError("NormalFormGame: tensor shape mismatch");
    }
    for (double v : table) {
      if (!std::isfinite(v)) throw InvalidInputError("NormalFormGame: non-finite payoff");
    }
  }
}

int NormalFormGame::flat_index(const std::vector<int>& profile) const {
  int flat = 0;
  for (int k = 0; k < num_players(); ++k) flat += profile[k] * strides_[k];
  return flat;
}

std::vector<int> NormalFormGame::decode(int flat) const {
  std::vector<int> profile(num_players());
  for (int k = 0; k < num_players(); ++k) {
    profile[k] = flat / strides_[k];
    flat %= strides_[k];
  }
  return profile;
}

Vec NormalFormGame::utility(int player, const std::vector<Vec>& profile) const {
  if (player < 0 || player >= num_players()) {
    throw BoundsError("utility: player index out of range");
  }
  Vec g = Vec::Zero(actions_[player]);
  const auto& table = payoffs_[player];
  for (int flat = 0; flat < num_profiles_; ++flat) {
    double w = 1.0;
    int rest = flat;
    int own = 0;
    for (int k = 0; k < num_players(); ++k) {
      const int a = rest / strides_[k];
      rest %= strides_[k];
      if (k == player) {
        own = a;
      } else {
        w *= profile[k][a];
      }
    }
    if (w != 0.0) g[own] += w * table[flat];
  }
  return g;
}

double NormalFormGame::expected_payoff(int player,
                                       const std::vector<Vec>& profile) const {
  return profile[player].dot(utility(player, profile));
}

double PotentialGame::potential(const std::vector<Vec>& profile) const {
  double phi = 0.0;
  for (int flat = 0; flat < base.num_profiles(); ++flat) {
    const auto a = base.decode(flat);
    double w = 1.0;
    for (int k = 0; k < base.num_players(); ++k) w *= profile[k][a[k]];
    phi += w * potential_table[flat];
  }
  return phi;
}

PotentialGame identical_interest_game(std::vector<int> actions,
                                      std::vector<double> table) {
  PotentialGame g;
  std::vector<std::vector<double>> payoffs(actions.size(), table);
  g.base = NormalFormGame(std::move(actions), std::move(payoffs));
  g.phi_max = 0.0;
  for (double v : table) g.phi_max = std::max(g.phi_max, std::abs(v));
  g.potential_table = std::move(table);
  return g;
}

Vec project_product(const std::vector<StrategySet>& blocks, const Vec& z) {
  if (blocks.empty()) return z;
  Vec out(z.size());
  int offset = 0;
  for (const auto& block : blocks) {
    const int d = set_dim(block);
    out.segment(offset, d) = project_l2(block, Vec(z.segment(offset, d)));
    offset += d;
  }
  return out;
}

VIOperator bilinear_operator(const MatrixGame& game) {
  const Mat a = game.loss_matrix();
  const int dx = game.dx();
  const int dy = game.dy();
  VIOperator op;
  op.dim = dx + dy;
  op.blocks = {Simplex{dx}, Simplex{dy}};
  op.lipschitz = spectral_norm(a);
  op.eval = [a, dx, dy](const Vec& z) {
    Vec f(dx + dy);
    f.head(dx) = a * z.tail(dy);
    f.tail(dy) = -(a.transpose() * z.head(dx));
    return f;
  };
  return op;
}

double ratio_game_value(const Mat& r, const Mat& s, const Vec& x, const Vec& y) {
  return x.dot(r * y) / x.dot(s * y);
}

VIOperator ratio_game_operator(const Mat& r, const Mat& s, double zeta) {
  if (r.rows() != s.rows() || r.cols() != s.cols()) {
    throw InvalidInputError("ratio game: R and S shapes differ");
  }
  if (!(zeta > 0.0) || s.minCoeff() < zeta) {
    throw InvalidInputError("ratio game: x^T S y >= zeta > 0 violated");
  }
  const int dx = static_cast<int>(r.rows());
  const int dy = static_cast<int>(r.cols());
  VIOperator op;
  op.dim = dx + dy;
  op.blocks = {Simplex{dx}, Simplex{dy}};
  op.eval = [r, s, dx, dy](const Vec& z) {
    const Vec x = z.head(dx);
    const Vec y = z.tail(dy);
    const double num = x.dot(r * y);
    const double den = x.dot(s * y);
    const double den2 = den * den;
    Vec f(dx + dy);
    f.head(dx) = (r * y * den - s * y * num) / den2;
    f.tail(dy) = -(r.transpose() * x * den - s.transpose() * x * num) / den2;
    return f;
  };
  return op;
}

double SecurityGame::attacker_utility(int type, const Vec& coverage,
                                      int target) const {
  const auto& t = types[type];
  return coverage[target] * t.covered[target] +
         (1.0 - coverage[target]) * t.uncovered[target];
}

double SecurityGame::defender_utility(const Vec& coverage, int target) const {
  return coverage[target] * defender_covered[target] +
         (1.0 - coverage[target]) * defender_uncovered[target];
}

Vec utility_gradient(const MatrixGame& game, int player,
                     const std::vector<Vec>& profile) {
  if (profile.size() != 2) throw BoundsError("matrix game profile needs two players");
  if (player == 0) return game.x_utility(profile[1]);
  if (player == 1) return game.y_utility(profile[0]);
  throw BoundsError("utility_gradient: player index out of range");
}

Vec utility_gradient(const NormalFormGame& game, int player,
                     const std::vector<Vec>& profile) {
  return game.utility(player, profile);
}

double spectral_norm(const Mat& a) {
  const int n = static_cast<int>(a.cols());
  if (a.size() == 0) return 0.0;
  Vec v(n);
  for (int j = 0; j < n; ++j) v[j] = 1.0 + 0.1 * std::sin(1.0 + j);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < 100000; ++it) {
    const Vec av = a * v;
    const double next = av.norm();
    if (next == 0.0) break;
    Vec w = a.transpose() * av;
    const double wn = w.norm();
    if (wn == 0.0) {
      sigma = next;
      break;
    }
    v = w / wn;
    if (it > 0 && std::abs(next - sigma) <= 1e-13 * next) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  // The deterministic start vector can be orthogonal to every nonzero
  // singular direction; fall back to a full SVD in that case.
  if (sigma == 0.0 && a.norm() > 0.0) {
    Eigen::JacobiSVD<Mat> svd(a);
    sigma = svd.singularValues()[0];
  }
  return sigma;
}

double lipschitz_constant(const MatrixGame& game) {
  return spectral_norm(game.a());
}

double lipschitz_constant(const NormalFormGame& game) {
  // u_k is multilinear in the opponents' strategies, so moving player j alone
  // changes u_k by a convex combination of the d_k x d_j slices of the
  // unfolded tensor. Bound each block by the largest slice spectral norm and
  // combine the blocks in l2.
  const int n = game.num_players();
  const auto& d = game.actions();
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    double sum_sq = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      double best = 0.0;
      for (int flat = 0; flat < game.num_profiles(); ++flat) {
        auto prof = game.decode(flat);
        if (prof[k] != 0 || prof[j] != 0) continue;
        Mat slice(d[k], d[j]);
        for (int a = 0; a < d[k]; ++a) {
          for (int b = 0; b < d[j]; ++b) {
            prof[k] = a;
            prof[j] = b;
            slice(a, b) = game.payoff(k, game.flat_index(prof));
          }
        }
        best = std::max(best, spectral_norm(slice));
      }
      sum_sq += best * best;
    }
    worst = std::max(worst, std::sqrt(sum_sq));
  }
  return worst;
}

MatrixGame lower_bound_family(int d, int r) {
  if (d < 1 || r < 1 || r > d) {
    throw BoundsError("lower_bound_family: need 1 <= r <= d");
  }
  Mat a = Mat::Zero(d, d);
  a.row(r - 1).setOnes();
  return MatrixGame(std::move(a), Orientation::kRowMaximizer);
}

MatrixGame matching_pennies() {
  return MatrixGame(Mat{{1.0, -1.0}, {-1.0, 1.0}});
}

MatrixGame matching_pennies_with_outside_option() {
  return MatrixGame(Mat{{1.0, -1.0, -0.2}, {-1.0, 1.0, -0.2}, {0.2, 0.2, -0.2}});
}

GameFamily parse_family(const std::string& name) {
  if (name == "perturbed-base") return GameFamily::kPerturbedBase;
  if (name == "lower-bound-prior") return GameFamily::kLowerBoundPrior;
  if (name == "potential-drift") return GameFamily::kPotentialDrift;
  throw ConfigError("unknown game family '" + name + "'");
}

Sequencing parse_sequencing(const std::string& name) {
  if (name == "random") return Sequencing::kRandom;
  if (name == "sorted") return Sequencing::kSorted;
  if (name == "alternating") return Sequencing::kAlternating;
  throw ConfigError("unknown sequencing mode '" + name + "'");
}

const char* family_name(GameFamily f) {
  switch (f) {
    case GameFamily::kPerturbedBase:
      return "perturbed-base";
    case GameFamily::kLowerBoundPrior:
      return "lower-bound-prior";
    case GameFamily::kPotentialDrift:
      return "potential-drift";
  }
  return "unknown";
}

const char* sequencing_name(Sequencing s) {
  switch (s) {
    case Sequencing::kRandom:
      return "random";
    case Sequencing::kSorted:
      return "sorted";
    case Sequencing::kAlternating:
      return "alternating";
  }
  return "unknown";
}

int GameSequence::size() const {
  return family == GameFamily::kPotentialDrift
             ? static_cast<int>(potential_games.size())
             : static_cast<int>(matrix_games.size());
}

namespace {

std::vector<int> task_order(const std::vector<double>& keys, Sequencing mode,
                            Rng& rng) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (mode == Sequencing::kRandom) {
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
    return order;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  if (mode == Sequencing::kSorted) return order;
  std::vector<int> alt;
  alt.reserve(n);
  int lo = 0;
  int hi = n - 1;
  while (lo <= hi) {
    alt.push_back(order[lo++]);
    if (lo <= hi) alt.push_back(order[hi--]);
  }
  return alt;
}

Mat normalized(Mat a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale > 1.0) a /= scale;
  return a;
}

}  // namespace

GameSequence sample_game_sequence(const SequenceConfig& config) {
  if (config.num_tasks < 1) throw ConfigError("sequence: T must be >= 1");
  Rng rng(derive_seed(config.seed, 0x5e9));
  Rng order_rng(derive_seed(config.seed, 0x0d3));
  GameSequence seq;
  seq.family = config.family;
  const int t_count = config.num_tasks;
  std::vector<double> keys(t_count);

  switch (config.family) {
    case GameFamily::kPerturbedBase: {
      if (config.base.size() == 0) throw ConfigError("perturbed-base: missing base matrix");
      if (config.delta < 0.0) throw ConfigError("perturbed-base: delta must be >= 0");
      std::vector<MatrixGame> pool;
      for (int t = 0; t < t_count; ++t) {
        Mat noise(config.base.rows(), config.base.cols());
        for (int i = 0; i < noise.rows(); ++i) {
          for (int j = 0; j < noise.cols(); ++j) noise(i, j) = rng.uniform(-1.0, 1.0);
        }
        keys[t] = noise.sum();
        pool.emplace_back(normalized(config.base + config.delta * noise));
      }
      for (int idx : task_order(keys, config.sequencing, order_rng)) {
        seq.matrix_games.push_back(pool[idx]);
        seq.keys.push_back(keys[idx]);
      }
      break;
    }
    case GameFamily::kLowerBoundPrior: {
      const Vec& p = config.prior;
      if (p.size() == 0 || p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-9) {
        throw ConfigError("lower-bound-prior: prior must be a distribution");
      }
      const int d = static_cast<int>(p.size());
      std::vector<int> rows(t_count);
      for (int t = 0; t < t_count; ++t) {
        rows[t] = rng.categorical(p) + 1;
        keys[t] = rows[t];
      }
      for (int idx : task_order(keys, config.sequencing, order_rng)) {
        seq.matrix_games.push_back(lower_bound_family(d, rows[idx]));
        seq.rows.push_back(rows[idx]);
        seq.keys.push_back(keys[idx]);
      }
      break;
    }
    case GameFamily::kPotentialDrift: {
      if (config.actions.empty()) throw ConfigError("potential-drift: missing action counts");
      if (config.drift < 0.0) throw ConfigError("potential-drift: drift must be >= 0");
      int profiles = 1;
      for (int a : config.actions) profiles *= a;
      std::vector<double> table(profiles);
      for (auto& v : table) v = rng.uniform(-1.0, 1.0);
      std::vector<PotentialGame> pool;
      for (int t = 0; t < t_count; ++t) {
        if (t > 0) {
          for (auto& v : table) {
            v = std::clamp(v + config.drift * rng.uniform(-1.0, 1.0), -1.0, 1.0);
          }
        }
        keys[t] = t;
        pool.push_back(identical_interest_game(config.actions, table));
        pool.back().phi_max = 1.0;
      }
      for (int idx : task_order(keys, config.sequencing, order_rng)) {
        seq.potential_games.push_back(pool[idx]);
        seq.keys.push_back(keys[idx]);
      }
      break;
    }
  }
  return seq;
}

}  // namespace metagames
