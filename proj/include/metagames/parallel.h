#ifndef METAGAMES_PARALLEL_H_
#define METAGAMES_PARALLEL_H_

#include <functional>
#include <vector>

#include "metagames/games.h"
#include "metagames/learners.h"

namespace metagames {

// Thread cap from METAGAMES_THREADS, or the OpenMP default when unset.
// Throws ConfigError for a value that is not a positive integer.
int thread_cap();

// Runs body(i) for i in [0, n). Iterations must write disjoint outputs; the
// result is then identical to the serial loop.
void parallel_for(int n, const std::function<void(int)>& body);
void serial_for(int n, const std::function<void(int)>& body);

struct RvuSample {
  double sum_regret = 0.0;    // lambda_x + lambda_y
  double min_slack = 0.0;     // min over players of RVU bound minus regret
  double refined_slack = 0.0; // same with the refined path term
  double gap_identity_error = 0.0;  // |(lambda_x + lambda_y)/m - dualgap(avg)|
  double dualgap = 0.0;
};

// Cold-start optimistic gradient self-play on one game with RVU and
// duality-gap bookkeeping.
RvuSample rvu_check(const MatrixGame& game, int m, double eta,
                    Regularizer reg = Regularizer::kEuclidean);

std::vector<RvuSample> rvu_batch_serial(const std::vector<MatrixGame>& games, int m,
                                        double eta);
std::vector<RvuSample> rvu_batch_parallel(const std::vector<MatrixGame>& games, int m,
                                          double eta);

// Duality gaps of many strategy pairs.
std::vector<double> duality_gaps_serial(const std::vector<MatrixGame>& games,
                                        const std::vector<Vec>& xs,
                                        const std::vector<Vec>& ys);
std::vector<double> duality_gaps_parallel(const std::vector<MatrixGame>& games,
                                          const std::vector<Vec>& xs,
                                          const std::vector<Vec>& ys);

}  // namespace metagames

#endif  // METAGAMES_PARALLEL_H_
