#include <omp.h>

#include <CLI11.hpp>
#include <iostream>

#include "mcslam/eval/run.hpp"
#include "mcslam/pipeline/builtins.hpp"
#include "mcslam/sim/simulator.hpp"

using namespace mcslam;

namespace {

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int simulate_cmd(const std::string& world, const std::string& path, const std::string& robot, std::uint64_t seed,
                 const std::string& out, const std::string& gt) {
  const auto result = sim::simulate(sim::parse_world(eval::read_file(world)), sim::parse_robot(eval::read_file(robot)),
                                    sim::parse_path(eval::read_file(path)), seed);
  eval::write_file(out, frontend::format_dataset(result.records));
  eval::write_file(gt, eval::format_tum(result.ground_truth));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cue 2D graph SLAM"};
  app.require_subcommand(1);

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a dataset and its ground truth");
  std::string world, path, robot, out, gt_out;
  std::uint64_t seed = 0;
  sim_cmd->add_option("--world", world, "World file (JSON lines of segments)")->required();
  sim_cmd->add_option("--path", path, "Path file (JSON lines of commands)")->required();
  sim_cmd->add_option("--robot", robot, "Robot file (JSON)")->required();
  sim_cmd->add_option("--seed", seed, "PRNG seed")->required();
  sim_cmd->add_option("--out", out, "Dataset output")->required();
  sim_cmd->add_option("--gt", gt_out, "Ground-truth TUM output")->required();

  auto* run_cmd = app.add_subcommand("run", "Run a pipeline over a dataset");
  eval::RunFiles files;
  std::string gt_in;
  int threads = 1;
  run_cmd->add_option("--config", files.config, "Pipeline config")->required();
  run_cmd->add_option("--dataset", files.dataset, "Dataset file")->required();
  run_cmd->add_option("--traj", files.trajectory, "Estimated trajectory output (TUM)")->required();
  run_cmd->add_option("--graph", files.graph, "Pose graph output")->required();
  run_cmd->add_option("--map", files.map, "SVG map output")->required();
  run_cmd->add_option("--gt", gt_in, "Ground truth (TUM) for metrics");
  run_cmd->add_option("--save-graph-every", files.save_graph_every, "Write graph_<step>.json every N packets");
  run_cmd->add_option("--delta", files.eval.delta, "RPE frame offset")->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", threads, "OpenMP threads for the kernels")->check(CLI::PositiveNumber);

  auto* eval_cmd = app.add_subcommand("eval", "Compare an estimate with ground truth");
  std::string eval_gt, eval_est;
  eval::EvalOptions options;
  bool no_align = false;
  eval_cmd->add_option("--gt", eval_gt, "Ground truth (TUM)")->required();
  eval_cmd->add_option("--est", eval_est, "Estimate (TUM)")->required();
  eval_cmd->add_option("--delta", options.delta, "RPE frame offset")->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--no-align", no_align, "Skip rigid alignment");
  eval_cmd->add_option("--max-dt", options.max_dt, "Association window (s)")->check(CLI::PositiveNumber);

  auto* config_cmd = app.add_subcommand("config", "Config files");
  config_cmd->require_subcommand(1);
  auto* config_new = config_cmd->add_subcommand("new", "Print a preset config");
  std::string preset;
  config_new->add_option("--preset", preset, "Preset name")
      ->required()
      ->check(CLI::IsMember(pipeline::preset_names()));

  auto* world_cmd = app.add_subcommand("world", "Export a built-in world, path and the default robot");
  std::string world_name, robot_out;
  world_cmd->add_option("--name", world_name, "Built-in world")
      ->required()
      ->check(CLI::IsMember(sim::builtin_world_names()));
  world_cmd->add_option("--world", world, "World output")->required();
  world_cmd->add_option("--path", path, "Path output")->required();
  world_cmd->add_option("--robot", robot_out, "Robot output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: Usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (*sim_cmd) return simulate_cmd(world, path, robot, seed, out, gt_out);
    if (*run_cmd) {
      omp_set_num_threads(threads);
      if (!gt_in.empty()) files.ground_truth = gt_in;
      std::cout << eval::format_report(eval::run_pipeline(files)) << '\n';
      return 0;
    }
    if (*eval_cmd) {
      options.align = !no_align;
      const auto report =
          eval::evaluate(eval::parse_tum(eval::read_file(eval_gt)), eval::parse_tum(eval::read_file(eval_est)), options);
      std::cout << eval::format_report(report) << '\n';
      return 0;
    }
    if (*config_new) {
      std::cout << pipeline::preset_config(preset);
      return 0;
    }
    if (*world_cmd) {
      eval::write_file(world, sim::format_world(sim::builtin_world(world_name)));
      eval::write_file(path, sim::format_path(sim::builtin_path(world_name)));
      if (!robot_out.empty()) eval::write_file(robot_out, sim::format_robot(sim::default_robot()));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 1;
}
