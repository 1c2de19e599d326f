#include "metagames/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "metagames/metrics.h"
#include "metagames/parallel.h"
#include "metagames/selfplay.h"

namespace metagames {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kKnownKeys[] = {
    "family", "sequencing", "T", "m", "seed", "base", "delta", "prior", "actions", "drift",
    "learner", "eta", "arms", "custom_anchors", "log_every", "summary_window",
    "dump_strategies", "name"};

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("config." + path + ": " + what);
}

template <typename T>
T get_or(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    field_error(path, "has the wrong type");
  }
}

Vec to_vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "must be a nonempty array of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) field_error(path + "[" + std::to_string(i) + "]", "must be a number");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Mat to_mat(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "must be a nonempty array of rows");
  const Vec first = to_vec(j[0], path + "[0]");
  Mat m(j.size(), first.size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vec row = to_vec(j[r], path + "[" + std::to_string(r) + "]");
    if (row.size() != first.size()) field_error(path, "rows have different lengths");
    m.row(static_cast<int>(r)) = row.transpose();
  }
  return m;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json vecs_json(const std::vector<Vec>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(vec_json(v));
  return out;
}

template <typename F>
auto wrap_enum(const std::string& path, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError& e) {
    field_error(path, e.what());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct GapPair {
  double total = 0.0;
  double worst = 0.0;
};

GapPair gaps_at(const GameSequence& seq, int task, const std::vector<Vec>& profile) {
  std::vector<double> g;
  if (seq.family == GameFamily::kPotentialDrift) {
    g = ne_gap(seq.potential_games[task].base, profile);
  } else {
    g = ne_gap(seq.matrix_games[task], profile[0], profile[1]);
  }
  GapPair out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (double v : g) {
    out.total += v;
    out.worst = std::max(out.worst, v);
  }
  return out;
}

}  // namespace

const char* eta_mode_name(EtaMode mode) {
  switch (mode) {
    case EtaMode::kFixed: return "fixed";
    case EtaMode::kDoubling: return "doubling";
    case EtaMode::kEwoo: return "ewoo";
  }
  return "fixed";
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& item : doc.items()) {
    if (std::find(std::begin(kKnownKeys), std::end(kKnownKeys), item.key()) ==
        std::end(kKnownKeys)) {
      field_error(item.key(), "unknown key");
    }
  }
  ExperimentConfig cfg;
  cfg.source = doc;
  if (!doc.contains("family")) field_error("family", "is required");
  const std::string family = get_or<std::string>(doc, "family", "family", "");
  cfg.sequence.family = wrap_enum("family", [&] { return parse_family(family); });
  const std::string seq = get_or<std::string>(doc, "sequencing", "sequencing", "random");
  cfg.sequence.sequencing = wrap_enum("sequencing", [&] { return parse_sequencing(seq); });
  cfg.sequence.num_tasks = get_or<int>(doc, "T", "T", 200);
  if (cfg.sequence.num_tasks < 1) field_error("T", "must be >= 1");
  cfg.m = get_or<int>(doc, "m", "m", 1000);
  if (cfg.m < 1) field_error("m", "must be >= 1");
  cfg.sequence.seed = get_or<std::uint64_t>(doc, "seed", "seed", 0);

  switch (cfg.sequence.family) {
    case GameFamily::kPerturbedBase:
      cfg.sequence.base = doc.contains("base") ? to_mat(doc["base"], "base")
                                               : matching_pennies_with_outside_option().a();
      cfg.sequence.delta = get_or<double>(doc, "delta", "delta", 0.05);
      if (cfg.sequence.delta < 0.0) field_error("delta", "must be >= 0");
      break;
    case GameFamily::kLowerBoundPrior:
      if (!doc.contains("prior")) field_error("prior", "is required for lower-bound-prior");
      cfg.sequence.prior = to_vec(doc["prior"], "prior");
      if (cfg.sequence.prior.minCoeff() < 0.0 ||
          std::abs(cfg.sequence.prior.sum() - 1.0) > 1e-9) {
        field_error("prior", "must be a probability vector");
      }
      break;
    case GameFamily::kPotentialDrift:
      cfg.sequence.actions = get_or<std::vector<int>>(doc, "actions", "actions", {2, 2, 2});
      for (int a : cfg.sequence.actions) {
        if (a < 1) field_error("actions", "entries must be >= 1");
      }
      cfg.sequence.drift = get_or<double>(doc, "drift", "drift", 0.01);
      if (cfg.sequence.drift < 0.0) field_error("drift", "must be >= 0");
      break;
  }

  if (doc.contains("learner")) {
    const json& l = doc["learner"];
    if (!l.is_object()) field_error("learner", "must be an object");
    for (const auto& item : l.items()) {
      if (item.key() != "regularizer" && item.key() != "prediction") {
        field_error("learner." + item.key(), "unknown key");
      }
    }
    const std::string reg = get_or<std::string>(l, "regularizer", "learner.regularizer",
                                                "euclidean");
    cfg.reg = wrap_enum("learner.regularizer", [&] { return parse_regularizer(reg); });
    const std::string pred = get_or<std::string>(l, "prediction", "learner.prediction",
                                                 "recency");
    cfg.prediction = wrap_enum("learner.prediction", [&] { return parse_prediction_mode(pred); });
  }
  if (doc.contains("eta")) {
    const json& e = doc["eta"];
    if (e.is_number()) {
      cfg.eta.value = e.get<double>();
    } else if (e.is_object()) {
      for (const auto& item : e.items()) {
        if (item.key() != "mode" && item.key() != "value") {
          field_error("eta." + item.key(), "unknown key");
        }
      }
      const std::string mode = get_or<std::string>(e, "mode", "eta.mode", "fixed");
      if (mode == "fixed") {
        cfg.eta.mode = EtaMode::kFixed;
      } else if (mode == "doubling") {
        cfg.eta.mode = EtaMode::kDoubling;
      } else if (mode == "ewoo") {
        cfg.eta.mode = EtaMode::kEwoo;
      } else {
        field_error("eta.mode", "must be fixed, doubling or ewoo");
      }
      cfg.eta.value = get_or<double>(e, "value", "eta.value", 0.01);
    } else {
      field_error("eta", "must be a number or an object");
    }
    if (!(cfg.eta.value > 0.0) || !std::isfinite(cfg.eta.value)) {
      field_error("eta.value", "must be positive");
    }
  }
  if (cfg.eta.mode == EtaMode::kEwoo && cfg.reg == Regularizer::kLogBarrier) {
    field_error("eta.mode", "ewoo needs a regularizer with finite divergence to vertices");
  }
  if (doc.contains("arms")) {
    const auto names = get_or<std::vector<std::string>>(doc, "arms", "arms", {});
    if (names.empty()) field_error("arms", "must list at least one initializer");
    cfg.arms.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string path = "arms[" + std::to_string(i) + "]";
      cfg.arms.push_back(wrap_enum(path, [&] { return parse_init_mode(names[i]); }));
    }
  }
  if (doc.contains("custom_anchors")) {
    const json& a = doc["custom_anchors"];
    if (!a.is_array()) field_error("custom_anchors", "must be an array of vectors");
    for (std::size_t k = 0; k < a.size(); ++k) {
      cfg.custom_anchors.push_back(to_vec(a[k], "custom_anchors[" + std::to_string(k) + "]"));
    }
  }
  const bool wants_custom =
      std::find(cfg.arms.begin(), cfg.arms.end(), InitMode::kCustomAnchor) != cfg.arms.end();
  if (wants_custom && cfg.custom_anchors.empty()) {
    field_error("custom_anchors", "is required by the custom-anchor arm");
  }
  const bool wants_ne =
      std::find(cfg.arms.begin(), cfg.arms.end(), InitMode::kNeAverage) != cfg.arms.end();
  if (wants_ne && cfg.sequence.family == GameFamily::kPotentialDrift) {
    field_error("arms", "ne-average needs matrix-game equilibria");
  }
  cfg.log_every = get_or<int>(doc, "log_every", "log_every", 1);
  if (cfg.log_every < 1) field_error("log_every", "must be >= 1");
  cfg.summary_window = get_or<int>(doc, "summary_window", "summary_window", 50);
  if (cfg.summary_window < 1) field_error("summary_window", "must be >= 1");
  cfg.dump_strategies = get_or<bool>(doc, "dump_strategies", "dump_strategies", false);
  return cfg;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

ArmResult run_arm(const ExperimentConfig& cfg, const GameSequence& seq, InitMode arm) {
  const bool potential = seq.family == GameFamily::kPotentialDrift;
  std::vector<StrategySet> sets;
  if (potential) {
    for (int a : seq.potential_games[0].base.actions()) sets.push_back(Simplex{a});
  } else {
    sets = {Simplex{seq.matrix_games[0].dx()}, Simplex{seq.matrix_games[0].dy()}};
  }
  const std::size_t n = sets.size();
  Initializer init = make_initializer(arm, sets, cfg.custom_anchors);

  std::vector<EwooState> ewoo;
  if (cfg.eta.mode == EtaMode::kEwoo) {
    const double rho = std::pow(static_cast<double>(seq.size()), -0.25);
    for (std::size_t k = 0; k < n; ++k) {
      // D bounds B_t = sqrt(D_R(x* || x0) / m); the Euclidean divergence on
      // the simplex is at most 1, the entropic one at most log d.
      const double div_max = cfg.reg == Regularizer::kEntropic
                                 ? std::log(static_cast<double>(set_dim(sets[k])))
                                 : 1.0;
      ewoo.push_back(make_ewoo(std::sqrt(std::max(div_max, 1e-12) / cfg.m), rho));
    }
  }

  ArmResult result;
  result.arm = arm;
  std::vector<Vec> inits = current_initialization(init);
  for (int t = 0; t < seq.size(); ++t) {
    SelfPlayOptions opts;
    opts.m = cfg.m;
    opts.record_history = false;
    std::vector<double> etas(n, cfg.eta.value);
    for (std::size_t k = 0; k < n; ++k) {
      if (cfg.eta.mode == EtaMode::kEwoo) etas[k] = ewoo_next_eta(ewoo[k]);
      opts.players.push_back(
          PlayerSpec{cfg.reg, etas[k], cfg.prediction, cfg.eta.mode == EtaMode::kDoubling});
    }
    std::vector<Vec> sums;
    for (const auto& s : sets) sums.push_back(Vec::Zero(set_dim(s)));
    opts.on_step = [&](int i, const std::vector<LearnerState>& learners) {
      for (std::size_t k = 0; k < n; ++k) sums[k] += learners[k].last_play;
      if (i % cfg.log_every != 0 && i != cfg.m) return;
      std::vector<Vec> avg;
      for (std::size_t k = 0; k < n; ++k) avg.push_back(sums[k] / i);
      const GapPair gaps = gaps_at(seq, t, avg);
      for (std::size_t k = 0; k < n; ++k) {
        RunRecord rec;
        rec.task = t;
        rec.iter = i;
        rec.player = static_cast<int>(k);
        rec.regret_cum = external_regret(learners[k]).value;
        rec.dualgap = gaps.total;
        rec.negap = gaps.worst;
        rec.pathlen2 = learners[k].sum_path2;
        rec.eta = learners[k].eta;
        rec.init_mode = arm;
        result.records.push_back(rec);
      }
    };
    SelfPlayResult play = potential ? self_play(seq.potential_games[t].base, inits, opts)
                                    : self_play(seq.matrix_games[t], inits, opts);

    TaskSummary sum;
    sum.task = t;
    sum.init = inits;
    sum.etas = etas;
    sum.averages = play.average;
    sum.rvu_slack = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const LearnerState& l = play.learners[k];
      const RegretResult r = external_regret(l);
      sum.sum_regret += r.value;
      sum.rvu_slack =
          std::min(sum.rvu_slack, rvu_bound(l, r.comparator, RvuStrength::kStandard) - r.value);
      sum.refined_path += l.sum_refined2;
      sum.optima.push_back(r.comparator);
      sum.last_iterates.push_back(l.last_play);
      if (!ewoo.empty()) {
        const double div = bregman(cfg.reg, r.comparator, inits[k]);
        ewoo_observe(ewoo[k], div / cfg.m, static_cast<double>(cfg.m));
      }
    }
    const GapPair final_gaps = gaps_at(seq, t, play.average);
    sum.dualgap = final_gaps.total;
    sum.negap = final_gaps.worst;

    TaskOutcome outcome;
    outcome.optima = sum.optima;
    outcome.last_iterates = sum.last_iterates;
    if (arm == InitMode::kNeAverage) {
      const NashSolution ne = solve_nash_lp(seq.matrix_games[t]);
      outcome.equilibria = {ne.x, ne.y};
    }
    result.tasks.push_back(std::move(sum));
    inits = next_initialization(init, outcome);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.config = cfg;
  res.sequence = sample_game_sequence(cfg.sequence);
  res.arms.resize(cfg.arms.size());
  parallel_for(static_cast<int>(cfg.arms.size()), [&](int a) {
    res.arms[a] = run_arm(cfg, res.sequence, cfg.arms[a]);
  });
  return res;
}

ArmComparison compare_arms(const ExperimentResult& result, int window) {
  if (result.arms.size() < 2) throw ConfigError("compare_arms: need at least two arms");
  ArmComparison cmp;
  const int t_count = static_cast<int>(result.arms[0].tasks.size());
  cmp.window = std::clamp(window, 1, t_count);
  for (const auto& arm : result.arms) {
    double total = 0.0;
    for (int t = t_count - cmp.window; t < t_count; ++t) total += arm.tasks[t].dualgap;
    cmp.names.push_back(init_mode_name(arm.arm));
    cmp.window_gap.push_back(total / cmp.window);
  }
  for (double g : cmp.window_gap) {
    cmp.ratio.push_back(g == cmp.window_gap[0] ? 1.0 : g / cmp.window_gap[0]);
  }
  return cmp;
}

void write_records_csv(std::ostream& out, const ExperimentResult& result) {
  out << "schema_version,task,iter,player,regret_cum,dualgap,negap,pathlen2,eta,init_mode\n";
  for (const auto& arm : result.arms) {
    for (const auto& r : arm.records) {
      out << kCsvSchemaVersion << ',' << r.task << ',' << r.iter << ',' << r.player << ','
          << fmt(r.regret_cum) << ',' << fmt(r.dualgap) << ',' << fmt(r.negap) << ','
          << fmt(r.pathlen2) << ',' << fmt(r.eta) << ',' << init_mode_name(r.init_mode) << '\n';
    }
  }
}

json summary_json(const ExperimentResult& result) {
  json out;
  out["schema_version"] = kCsvSchemaVersion;
  out["family"] = family_name(result.sequence.family);
  out["T"] = result.sequence.size();
  out["m"] = result.config.m;
  out["eta_mode"] = eta_mode_name(result.config.eta.mode);
  json arms = json::array();
  for (const auto& arm : result.arms) {
    json a;
    a["arm"] = init_mode_name(arm.arm);
    json tasks = json::array();
    for (const auto& t : arm.tasks) {
      json j;
      j["task"] = t.task;
      j["dualgap"] = t.dualgap;
      j["negap"] = t.negap;
      j["sum_regret"] = t.sum_regret;
      j["rvu_slack"] = t.rvu_slack;
      j["refined_path"] = t.refined_path;
      j["etas"] = t.etas;
      j["init"] = vecs_json(t.init);
      j["optima"] = vecs_json(t.optima);
      j["last_iterates"] = vecs_json(t.last_iterates);
      tasks.push_back(std::move(j));
    }
    a["tasks"] = std::move(tasks);
    arms.push_back(std::move(a));
  }
  out["arms"] = std::move(arms);
  if (result.arms.size() >= 2) {
    const ArmComparison cmp = compare_arms(result, result.config.summary_window);
    json c;
    c["window"] = cmp.window;
    for (std::size_t i = 0; i < cmp.names.size(); ++i) {
      c["arms"].push_back({{"arm", cmp.names[i]},
                           {"window_gap", cmp.window_gap[i]},
                           {"ratio", cmp.ratio[i]}});
    }
    out["comparison"] = std::move(c);
  }
  return out;
}

void write_outputs(const ExperimentResult& result, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  {
    std::ofstream csv(fs::path(dir) / "records.csv");
    if (!csv) throw ConfigError("cannot write records.csv in '" + dir + "'");
    write_records_csv(csv, result);
  }
  {
    std::ofstream s(fs::path(dir) / "summary.json");
    s << summary_json(result).dump(1) << '\n';
  }
  {
    std::ofstream c(fs::path(dir) / "config.json");
    c << result.config.source.dump(1) << '\n';
  }
  if (result.config.dump_strategies) {
    json out = json::array();
    for (const auto& arm : result.arms) {
      json a;
      a["arm"] = init_mode_name(arm.arm);
      for (const auto& t : arm.tasks) a["averages"].push_back(vecs_json(t.averages));
      out.push_back(std::move(a));
    }
    std::ofstream s(fs::path(dir) / "strategies.json");
    s << out.dump(1) << '\n';
  }
}

std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec) {
  if (series.empty()) throw InvalidInputError("plot: no series");
  bool all_positive = true;
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : series) {
    if (s.xs.empty() || s.xs.size() != s.ys.size()) {
      throw InvalidInputError("plot: series '" + s.name + "' is empty or misaligned");
    }
    for (double y : s.ys) {
      if (!(y > 0.0)) all_positive = false;
    }
  }
  const bool log_y = spec.log_y && all_positive;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      xmin = std::min(xmin, s.xs[i]);
      xmax = std::max(xmax, s.xs[i]);
      ymin = std::min(ymin, ty(s.ys[i]));
      ymax = std::max(ymax, ty(s.ys[i]));
    }
  }
  if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
    throw InvalidInputError("plot: no finite points");
  }
  auto pad = [](double& lo, double& hi) {
    const double range = hi - lo;
    const double p = range > 0.0 ? 0.05 * range : (lo != 0.0 ? 0.05 * std::abs(lo) : 0.05);
    lo -= p;
    hi += p;
  };
  pad(xmin, xmax);
  pad(ymin, ymax);

  const double w = 720.0, h = 440.0, left = 80.0, right = 180.0, top = 40.0, bottom = 60.0;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b"};

  std::ostringstream svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                w, h, w, h);
  svg << buf;
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                left, top, pw, ph);
  svg << buf;
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double sx = left + pw * i / 4.0;
    const double sy = top + ph * (1.0 - i / 4.0);
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%s</text>\n",
                  sx, top + ph + 16.0, fmt_short(fx).c_str());
    svg << buf;
    const std::string label = log_y ? fmt_short(std::pow(10.0, fy)) : fmt_short(fy);
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%s</text>\n",
                  left - 6.0, sy + 4.0, label.c_str());
    svg << buf;
  }
  svg << "<text x=\"" << fmt_short(left + pw / 2) << "\" y=\"" << fmt_short(h - 16.0)
      << "\" font-size=\"13\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt_short(top + ph / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt_short(top + ph / 2) << ")\">" << xml_escape(spec.y_label)
      << (log_y ? " (log)" : "") << "</text>\n";
  if (!spec.title.empty()) {
    svg << "<text x=\"" << fmt_short(left + pw / 2)
        << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << xml_escape(spec.title)
        << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 6];
    svg << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < series[s].xs.size(); ++i) {
      if (!std::isfinite(series[s].ys[i])) continue;
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(series[s].xs[i]), py(series[s].ys[i]));
      svg << buf;
    }
    svg << "\"/>\n";
    const double ly = top + 16.0 + 20.0 * s;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n",
                  left + pw + 12.0, ly, left + pw + 36.0, ly, color);
    svg << buf;
    std::snprintf(buf, sizeof(buf), "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">",
                  left + pw + 42.0, ly + 4.0);
    svg << buf << xml_escape(series[s].name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<Series> series_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("schema_version,", 0) != 0) {
    throw ConfigError("'" + path + "' is not a records CSV");
  }
  // arm -> iter -> (sum, count)
  std::map<std::string, std::map<int, std::pair<double, int>>> acc;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw ConfigError("'" + path + "': malformed row '" + line + "'");
    if (cells[3] != "0") continue;
    const std::string& arm = cells[9];
    if (!acc.count(arm)) order.push_back(arm);
    auto& slot = acc[arm][std::stoi(cells[2])];
    slot.first += std::stod(cells[5]);
    slot.second += 1;
  }
  std::vector<Series> out;
  for (const auto& arm : order) {
    Series s;
    s.name = arm;
    for (const auto& [iter, sc] : acc[arm]) {
      s.xs.push_back(iter);
      s.ys.push_back(sc.first / sc.second);
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw InvalidInputError("plot: '" + path + "' has no records");
  return out;
}

namespace {

void set_dotted(json& doc, const std::string& key, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) {
      // A scalar eta becomes {"value": eta} so that eta.mode can be swept.
      json fresh = json::object();
      if (node->contains(part) && (*node)[part].is_number()) fresh["value"] = (*node)[part];
      (*node)[part] = fresh;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void run_sweep(const json& base, const json& grid, const std::string& out_dir) {
  if (!grid.is_object() || grid.empty()) {
    throw ConfigError("grid: must be a nonempty object of key -> value list");
  }
  std::vector<std::string> keys;
  std::vector<json> values;
  for (const auto& item : grid.items()) {
    if (!item.value().is_array() || item.value().empty()) {
      throw ConfigError("grid." + item.key() + ": must be a nonempty array");
    }
    keys.push_back(item.key());
    values.push_back(item.value());
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create '" + out_dir + "': " + ec.message());
  std::ofstream out(fs::path(out_dir) / "sweep.csv");
  if (!out) throw ConfigError("cannot write sweep.csv in '" + out_dir + "'");
  out << "point,overrides,arm,window_gap,ratio\n";

  std::vector<std::size_t> idx(keys.size(), 0);
  int point = 0;
  while (true) {
    json doc = base;
    json overrides = json::object();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      set_dotted(doc, keys[k], values[k][idx[k]]);
      overrides[keys[k]] = values[k][idx[k]];
    }
    const ExperimentConfig cfg = parse_config(doc);
    const ExperimentResult res = run_experiment(cfg);
    std::vector<double> gaps;
    std::vector<double> ratios;
    if (res.arms.size() >= 2) {
      const ArmComparison cmp = compare_arms(res, cfg.summary_window);
      gaps = cmp.window_gap;
      ratios = cmp.ratio;
    } else {
      const auto& tasks = res.arms[0].tasks;
      const int w = std::min<int>(cfg.summary_window, static_cast<int>(tasks.size()));
      double total = 0.0;
      for (int t = static_cast<int>(tasks.size()) - w; t < static_cast<int>(tasks.size()); ++t) {
        total += tasks[t].dualgap;
      }
      gaps = {total / w};
      ratios = {1.0};
    }
    for (std::size_t a = 0; a < res.arms.size(); ++a) {
      out << point << ',' << csv_quote(overrides.dump()) << ',' << init_mode_name(res.arms[a].arm)
          << ',' << fmt(gaps[a]) << ',' << fmt(ratios[a]) << '\n';
    }
    ++point;
    std::size_t k = 0;
    while (k < keys.size()) {
      if (++idx[k] < values[k].size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == keys.size()) break;
  }
}

json build_report(const std::string& dir) {
  const json config_doc = read_json_file((fs::path(dir) / "config.json").string());
  const json summary = read_json_file((fs::path(dir) / "summary.json").string());
  const ExperimentConfig cfg = parse_config(config_doc);
  const GameSequence seq = sample_game_sequence(cfg.sequence);

  json report;
  report["family"] = family_name(seq.family);
  report["T"] = seq.size();
  report["m"] = cfg.m;

  json audit = json::array();
  std::vector<std::vector<Vec>> optima_by_player;
  for (const auto& arm : summary.at("arms")) {
    double min_slack = std::numeric_limits<double>::infinity();
    int violations = 0;
    double gap_total = 0.0;
    for (const auto& t : arm.at("tasks")) {
      const double s = t.at("rvu_slack").get<double>();
      min_slack = std::min(min_slack, s);
      if (s < -1e-8) ++violations;
      gap_total += t.at("dualgap").get<double>();
    }
    const double count = static_cast<double>(arm.at("tasks").size());
    audit.push_back({{"arm", arm.at("arm")},
                     {"min_rvu_slack", min_slack},
                     {"rvu_violations", violations},
                     {"mean_dualgap", gap_total / count}});
    if (optima_by_player.empty()) {
      for (const auto& t : arm.at("tasks")) {
        const auto& opt = t.at("optima");
        optima_by_player.resize(opt.size());
        for (std::size_t k = 0; k < opt.size(); ++k) {
          optima_by_player[k].push_back(to_vec(opt[k], "optima"));
        }
      }
    }
  }
  report["bound_audit"] = audit;

  json sim;
  for (std::size_t k = 0; k < optima_by_player.size(); ++k) {
    const auto& opts = optima_by_player[k];
    Vec mean = Vec::Zero(opts[0].size());
    for (const auto& o : opts) mean += o;
    mean /= static_cast<double>(opts.size());
    sim["v_opt2"].push_back(task_variance(opts));
    sim["v_kl"].push_back(kl_similarity(opts));
    sim["mean_optimum_entropy"].push_back(entropy(mean));
  }
  if (seq.family == GameFamily::kPotentialDrift) {
    sim["v_diff"] = v_diff(seq.potential_games);
  } else {
    std::vector<Vec> joint;
    std::vector<double> values;
    for (const auto& g : seq.matrix_games) {
      const NashSolution ne = solve_nash_lp(g);
      Vec z(ne.x.size() + ne.y.size());
      z << ne.x, ne.y;
      joint.push_back(z);
      values.push_back(ne.value);
    }
    sim["v_ne2_selected"] = ne_variance(joint);
    const BestNeResult best = ne_variance_best(seq.matrix_games, values);
    sim["v_ne2_best"] = best.value;
  }
  report["similarity"] = sim;

  std::ofstream js(fs::path(dir) / "report.json");
  js << report.dump(1) << '\n';
  std::ofstream md(fs::path(dir) / "report.md");
  md << "# Run report\n\n";
  md << "family: " << report["family"].get<std::string>() << ", T = " << seq.size()
     << ", m = " << cfg.m << "\n\n";
  md << "| arm | min RVU slack | violations | mean duality gap |\n|---|---|---|---|\n";
  for (const auto& a : audit) {
    md << "| " << a["arm"].get<std::string>() << " | " << fmt_short(a["min_rvu_slack"].get<double>())
       << " | " << a["rvu_violations"].get<int>() << " | "
       << fmt_short(a["mean_dualgap"].get<double>()) << " |\n";
  }
  md << "\nSimilarity statistics:\n\n```\n" << sim.dump(1) << "\n```\n";
  return report;
}

}  // namespace metagames
