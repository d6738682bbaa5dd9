#include "mcslam/pipeline/pipeline.hpp"

namespace mcslam::pipeline {

void Pipeline::configure() {
  assembly_.primary_topic = param<std::string>("primary_topic");
  assembly_.sync_window = param<double>("sync_window");
  if (assembly_.primary_topic.empty() || !(assembly_.sync_window >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Pipeline needs a primary_topic and sync_window >= 0");
  }
  preprocessors_ = slot_list_as<frontend::Preprocessor>("preprocessors");
  tracker_ = slot_as<frontend::MultiTracker>("tracker");
  graph_ = slot_as<graph::GraphSlam>("graph");
  reset();
}

void Pipeline::reset() {
  for (auto* p : preprocessors_) p->reset();
  tracker_->reset();
  graph_->reset();
  packets_ = 0;
  pending_relative_ = Pose2::identity();
  finished_ = false;
}

frontend::MeasurementPacket Pipeline::preprocess(const frontend::RawPacket& raw) {
  frontend::MeasurementPacket packet;
  packet.timestamp = raw.timestamp;
  for (auto* p : preprocessors_) p->process(raw, packet);
  return packet;
}

frontend::TrackerEvent Pipeline::process(const frontend::RawPacket& raw) {
  if (finished_) throw Error(ErrorCode::InvalidArgument, "pipeline already finished; reset first");
  auto event = tracker_->track(preprocess(raw));
  ++packets_;
  if (event.finished_map) {
    graph_->add_map(*event.finished_map, pending_relative_);
    pending_relative_ = event.closing_relative;
  }
  return event;
}

void Pipeline::finish() {
  if (finished_) return;
  finished_ = true;
  if (tracker_->started()) graph_->add_map(tracker_->current_map(), pending_relative_);
  graph_->finish();
}

void Pipeline::run(const std::vector<frontend::DatasetRecord>& records,
                   const std::function<void(std::size_t)>& checkpoint) {
  const auto raw = frontend::assemble_packets(records, assembly_);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    try {
      process(raw[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "packet " + std::to_string(i) + ": " + e.what());
    }
    if (checkpoint) checkpoint(packets_);
  }
  finish();
}

std::vector<StampedPose> Pipeline::trajectory() const {
  auto out = graph::world_trajectory(graph_->graph());
  if (finished_ || !tracker_->started()) return out;
  const auto& nodes = graph_->graph().nodes;
  const Pose2 origin = nodes.empty() ? Pose2::identity() : compose(nodes.back().pose, pending_relative_);
  for (const auto& s : tracker_->current_map().trajectory) out.push_back({s.timestamp, compose(origin, s.pose)});
  return out;
}

}  // namespace mcslam::pipeline
