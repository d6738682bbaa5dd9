#pragma once

#include <functional>

#include "mcslam/config/configurable.hpp"
#include "mcslam/frontend/dataset.hpp"
#include "mcslam/frontend/preprocess.hpp"
#include "mcslam/frontend/tracker.hpp"
#include "mcslam/graph/graph_slam.hpp"

namespace mcslam::pipeline {

using geometry::Pose2;
using geometry::StampedPose;

/// Top-level module: pre-processors feed the tracker, finished local maps
/// feed the graph.
///
/// Params: primary_topic, sync_window. Slots: preprocessors (list), tracker,
/// graph.
class Pipeline : public config::Configurable {
 public:
  void configure() override;
  void reset();

  frontend::AssemblySettings assembly() const { return assembly_; }

  frontend::MeasurementPacket preprocess(const frontend::RawPacket& raw);
  frontend::TrackerEvent process(const frontend::RawPacket& raw);
  /// Adds the open local map to the graph and runs the final optimization.
  void finish();

  /// Packs every record, processes them in order and finishes. `checkpoint`
  /// runs after every packet with the packet count.
  void run(const std::vector<frontend::DatasetRecord>& records,
           const std::function<void(std::size_t)>& checkpoint = {});

  std::size_t packets() const { return packets_; }
  const frontend::MultiTracker& tracker() const { return *tracker_; }
  const graph::GraphSlam& graph_slam() const { return *graph_; }
  const graph::PoseGraph& graph() const { return graph_->graph(); }

  /// World-frame poses of all processed packets: graph nodes compose their
  /// local trajectories; the open map is placed after the last node.
  std::vector<StampedPose> trajectory() const;

 private:
  frontend::AssemblySettings assembly_;
  std::vector<frontend::Preprocessor*> preprocessors_;
  frontend::MultiTracker* tracker_ = nullptr;
  graph::GraphSlam* graph_ = nullptr;

  std::size_t packets_ = 0;
  Pose2 pending_relative_;  // origin of the open map in the last node frame
  bool finished_ = false;
};

}  // namespace mcslam::pipeline
