#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "mcslam/eval/metrics.hpp"
#include "mcslam/frontend/dataset.hpp"
#include "mcslam/graph/pose_graph.hpp"

namespace mcslam::eval {

struct RunResult {
  Trajectory trajectory;
  graph::PoseGraph graph;
  std::size_t packets = 0;
  double seconds = 0.0;  // wall clock spent processing packets
  double frame_rate() const { return seconds > 0.0 ? static_cast<double>(packets) / seconds : 0.0; }
};

/// Instantiates `config_text` with the built-in registry and streams the
/// records through it. `checkpoint(packet_count, graph)` runs every
/// `checkpoint_every` packets when both are set.
RunResult run_dataset(std::string_view config_text, const std::vector<frontend::DatasetRecord>& records,
                      std::size_t checkpoint_every = 0,
                      const std::function<void(std::size_t, const graph::PoseGraph&)>& checkpoint = {});

struct RunFiles {
  std::string config;
  std::string dataset;
  std::string trajectory;
  std::string graph;
  std::string map;
  std::optional<std::string> ground_truth;
  std::size_t save_graph_every = 0;  // writes graph_<step>.json next to `graph`
  EvalOptions eval;
};

/// File-level run: reads config and dataset, writes the TUM trajectory,
/// graph and SVG map. The report carries frame_rate always and the metrics
/// when ground truth is given.
MetricReport run_pipeline(const RunFiles& files);

/// Scene points as dots, loop edges as lines, the estimate (and optionally
/// the ground truth) as polylines.
std::string render_svg(const graph::PoseGraph& graph, const Trajectory& estimate,
                       const Trajectory* ground_truth = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace mcslam::eval
