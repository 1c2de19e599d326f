#ifndef METAGAMES_HARNESS_H_
#define METAGAMES_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "metagames/common.h"
#include "metagames/games.h"
#include "metagames/learners.h"
#include "metagames/meta.h"

namespace metagames {

inline constexpr int kCsvSchemaVersion = 1;

enum class EtaMode { kFixed, kDoubling, kEwoo };

const char* eta_mode_name(EtaMode mode);

struct EtaSpec {
  EtaMode mode = EtaMode::kFixed;
  double value = 0.01;
};

struct ExperimentConfig {
  SequenceConfig sequence;
  int m = 1000;
  Regularizer reg = Regularizer::kEuclidean;
  PredictionMode prediction = PredictionMode::kRecency;
  EtaSpec eta;
  std::vector<InitMode> arms{InitMode::kCold, InitMode::kFtlAverage, InitMode::kLastIterate};
  std::vector<Vec> custom_anchors;
  int log_every = 1;
  int summary_window = 50;
  bool dump_strategies = false;
  nlohmann::json source;  // the parsed document, echoed into outputs
};

// Keys (all optional except the family block):
//   family, sequencing, T, m, seed, base, delta, prior, actions, drift,
//   learner.regularizer, learner.prediction, eta.mode, eta.value, arms,
//   custom_anchors, log_every, summary_window, dump_strategies.
// Errors name the offending field path, e.g. "config.eta.value".
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

struct RunRecord {
  int task = 0;
  int iter = 0;
  int player = 0;
  double regret_cum = 0.0;
  double dualgap = 0.0;  // sum of players' best-deviation gains at the averages
  double negap = 0.0;    // largest single player's gain at the averages
  double pathlen2 = 0.0;
  double eta = 0.0;
  InitMode init_mode = InitMode::kCold;
};

struct TaskSummary {
  int task = 0;
  double dualgap = 0.0;
  double negap = 0.0;
  double sum_regret = 0.0;
  double rvu_slack = 0.0;     // min over players of the RVU bound minus regret
  double refined_path = 0.0;  // summed over players
  std::vector<double> etas;
  std::vector<Vec> init;
  std::vector<Vec> optima;
  std::vector<Vec> last_iterates;
  std::vector<Vec> averages;
};

struct ArmResult {
  InitMode arm = InitMode::kCold;
  std::vector<RunRecord> records;
  std::vector<TaskSummary> tasks;
};

struct ExperimentResult {
  ExperimentConfig config;
  GameSequence sequence;
  std::vector<ArmResult> arms;
};

ArmResult run_arm(const ExperimentConfig& config, const GameSequence& sequence, InitMode arm);

// Samples the sequence once and runs every arm on it. Arms run in parallel.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct ArmComparison {
  std::vector<std::string> names;
  std::vector<double> window_gap;  // mean final dualgap over the last `window` tasks
  std::vector<double> ratio;       // window_gap / window_gap of the first arm
  int window = 0;
};

ArmComparison compare_arms(const ExperimentResult& result, int window);

void write_records_csv(std::ostream& out, const ExperimentResult& result);
nlohmann::json summary_json(const ExperimentResult& result);

// records.csv, summary.json, config.json and, when requested, strategies.json.
void write_outputs(const ExperimentResult& result, const std::string& dir);

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label = "task-averaged duality gap";
  bool log_y = true;  // ignored unless every value is positive
};

std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec);

// One series per init_mode: the task-averaged dualgap at each logged
// iteration, read from player-0 rows.
std::vector<Series> series_from_csv(const std::string& path);

// Cartesian product of grid values applied to dotted config keys; writes
// sweep.csv with one row per (grid point, arm).
void run_sweep(const nlohmann::json& base, const nlohmann::json& grid, const std::string& out_dir);

// Similarity statistics and a bound-slack audit for a finished run directory.
nlohmann::json build_report(const std::string& dir);

}  // namespace metagames

#endif  // METAGAMES_HARNESS_H_
