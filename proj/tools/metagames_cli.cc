#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "metagames/harness.h"
#include "metagames/parallel.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitOther = 1;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-learning in games: experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool dump_strategies = false;
  auto* run = app.add_subcommand("run", "Run every arm of an experiment config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--dump-strategies", dump_strategies,
                "Also write average strategies to strategies.json");

  std::string grid_path;
  std::string sweep_out = "sweep_out";
  auto* sweep = app.add_subcommand("sweep", "Run a config over a parameter grid");
  sweep->add_option("--config", config_path, "Base experiment config (JSON)")->required();
  sweep->add_option("--grid", grid_path, "Grid of dotted keys to value lists (JSON)")->required();
  sweep->add_option("--out", sweep_out, "Output directory for sweep.csv");

  std::string records_path;
  std::string figure_path;
  std::string title;
  bool linear = false;
  auto* plot = app.add_subcommand("plot", "Render task-averaged gap curves to SVG");
  plot->add_option("records", records_path, "records.csv from a run")->required();
  plot->add_option("-o,--output", figure_path, "SVG path")->required();
  plot->add_option("--title", title, "Figure title");
  plot->add_flag("--linear", linear, "Linear instead of log y axis");

  auto* report = app.add_subcommand("report", "Similarity statistics and bound audit of a run");
  report->add_option("--out", out_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    metagames::thread_cap();
    if (*run) {
      nlohmann::json doc = metagames::read_json_file(config_path);
      if (dump_strategies) doc["dump_strategies"] = true;
      const auto cfg = metagames::parse_config(doc);
      const auto result = metagames::run_experiment(cfg);
      metagames::write_outputs(result, out_dir);
      std::cout << "wrote " << out_dir << "/records.csv and summary.json\n";
      if (result.arms.size() >= 2) {
        const auto cmp = metagames::compare_arms(result, cfg.summary_window);
        for (std::size_t i = 0; i < cmp.names.size(); ++i) {
          std::cout << cmp.names[i] << ": gap over last " << cmp.window
                    << " tasks = " << cmp.window_gap[i] << " (ratio " << cmp.ratio[i] << ")\n";
        }
      }
    } else if (*sweep) {
      metagames::run_sweep(metagames::read_json_file(config_path),
                           metagames::read_json_file(grid_path), sweep_out);
      std::cout << "wrote " << sweep_out << "/sweep.csv\n";
    } else if (*plot) {
      metagames::PlotSpec spec;
      spec.title = title;
      spec.log_y = !linear;
      const std::string svg =
          metagames::render_svg(metagames::series_from_csv(records_path), spec);
      std::ofstream f(figure_path);
      if (!f) throw metagames::ConfigError("cannot write '" + figure_path + "'");
      f << svg;
      std::cout << "wrote " << figure_path << "\n";
    } else if (*report) {
      const auto rep = metagames::build_report(out_dir);
      std::cout << rep.dump(1) << "\n";
    }
  } catch (const metagames::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const metagames::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOk;
}
