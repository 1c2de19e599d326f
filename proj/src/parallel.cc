#include "metagames/parallel.h"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>

#include <omp.h>

#include "metagames/metrics.h"
#include "metagames/selfplay.h"

namespace metagames {

int thread_cap() {
  const char* env = std::getenv("METAGAMES_THREADS");
  if (env == nullptr || *env == '\0') return omp_get_max_threads();
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw ConfigError(std::string("METAGAMES_THREADS must be a positive integer, got '") + env +
                      "'");
  }
  return static_cast<int>(v);
}

void serial_for(int n, const std::function<void(int)>& body) {
  for (int i = 0; i < n; ++i) body(i);
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int threads = thread_cap();
  std::exception_ptr error = nullptr;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(metagames_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

RvuSample rvu_check(const MatrixGame& game, int m, double eta, Regularizer reg) {
  SelfPlayOptions opts;
  opts.m = m;
  opts.players = {PlayerSpec{reg, eta, PredictionMode::kRecency, false}};
  opts.record_history = false;
  const std::vector<Vec> inits{Vec::Constant(game.dx(), 1.0 / game.dx()),
                               Vec::Constant(game.dy(), 1.0 / game.dy())};
  const SelfPlayResult res = self_play(game, inits, opts);
  RvuSample out;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.refined_slack = std::numeric_limits<double>::infinity();
  for (const auto& l : res.learners) {
    const RegretResult r = external_regret(l);
    out.sum_regret += r.value;
    out.min_slack =
        std::min(out.min_slack, rvu_bound(l, r.comparator, RvuStrength::kStandard) - r.value);
    out.refined_slack =
        std::min(out.refined_slack, rvu_bound(l, r.comparator, RvuStrength::kRefined) - r.value);
  }
  out.dualgap = duality_gap(game, res.average[0], res.average[1]);
  out.gap_identity_error = std::abs(out.sum_regret / m - out.dualgap);
  return out;
}

std::vector<RvuSample> rvu_batch_serial(const std::vector<MatrixGame>& games, int m,
                                        double eta) {
  std::vector<RvuSample> out(games.size());
  serial_for(static_cast<int>(games.size()),
             [&](int i) { out[i] = rvu_check(games[i], m, eta); });
  return out;
}

std::vector<RvuSample> rvu_batch_parallel(const std::vector<MatrixGame>& games, int m,
                                          double eta) {
  std::vector<RvuSample> out(games.size());
  parallel_for(static_cast<int>(games.size()),
               [&](int i) { out[i] = rvu_check(games[i], m, eta); });
  return out;
}

namespace {

void check_gap_inputs(const std::vector<MatrixGame>& games, const std::vector<Vec>& xs,
                      const std::vector<Vec>& ys) {
  if (xs.size() != games.size() || ys.size() != games.size()) {
    throw InvalidInputError("duality gaps: one strategy pair per game");
  }
}

}  // namespace

std::vector<double> duality_gaps_serial(const std::vector<MatrixGame>& games,
                                        const std::vector<Vec>& xs,
                                        const std::vector<Vec>& ys) {
  check_gap_inputs(games, xs, ys);
  std::vector<double> out(games.size());
  serial_for(static_cast<int>(games.size()),
             [&](int i) { out[i] = duality_gap(games[i], xs[i], ys[i]); });
  return out;
}

std::vector<double> duality_gaps_parallel(const std::vector<MatrixGame>& games,
                                          const std::vector<Vec>& xs,
                                          const std::vector<Vec>& ys) {
  check_gap_inputs(games, xs, ys);
  std::vector<double> out(games.size());
  parallel_for(static_cast<int>(games.size()),
               [&](int i) { out[i] = duality_gap(games[i], xs[i], ys[i]); });
  return out;
}

}  // namespace metagames
