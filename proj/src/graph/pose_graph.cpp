#include "mcslam/graph/pose_graph.hpp"

#include <algorithm>
#include <cmath>

#include "mcslam/core/serialization.hpp"

namespace mcslam::graph {

using core::Json;
using geometry::PointCloud2;
using geometry::StampedPose;

const GraphNode* PoseGraph::find(std::int64_t id) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                   [](const GraphNode& n, std::int64_t v) { return n.id < v; });
  return it != nodes.end() && it->id == id ? &*it : nullptr;
}

GraphNode* PoseGraph::find(std::int64_t id) {
  return const_cast<GraphNode*>(std::as_const(*this).find(id));
}

void add_local_map(PoseGraph& graph, LocalMap map, const Pose2& relative, const Eigen::Matrix3d& information) {
  GraphNode node;
  if (graph.nodes.empty()) {
    node.id = 0;
    node.pose = Pose2::identity();
  } else {
    const GraphNode& prev = graph.nodes.back();
    node.id = prev.id + 1;
    node.pose = compose(prev.pose, relative);
    graph.edges.push_back({prev.id, node.id, relative, information, EdgeKind::Odometry});
  }
  map.id = node.id;
  node.local_map = std::move(map);
  graph.nodes.push_back(std::move(node));
}

std::vector<LoopCandidate> detect_loops(const PoseGraph& graph, std::int64_t query_id, double radius,
                                        std::size_t exclude_recent) {
  const GraphNode* query = graph.find(query_id);
  if (query == nullptr) throw Error(ErrorCode::NotFound, "no node " + std::to_string(query_id));
  std::vector<std::pair<double, std::int64_t>> found;
  for (const auto& n : graph.nodes) {
    if (n.id >= query_id - static_cast<std::int64_t>(exclude_recent)) continue;
    const double d = (n.pose.translation() - query->pose.translation()).norm();
    if (d <= radius) found.emplace_back(d, n.id);
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<LoopCandidate> out(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    out[i].query_id = query_id;
    out[i].match_id = found[i].second;
    out[i].initial_guess = geometry::between(graph.find(found[i].second)->pose, query->pose);
  }
  return out;
}

LoopResult validate_loop(const LoopCandidate& candidate, const PoseGraph& graph, frontend::MultiAligner& aligner,
                         const LoopThresholds& thresholds) {
  const GraphNode* query = graph.find(candidate.query_id);
  const GraphNode* match = graph.find(candidate.match_id);
  if (query == nullptr || match == nullptr) throw Error(ErrorCode::NotFound, "loop candidate names a missing node");

  LoopResult result;
  result.relative = candidate.initial_guess;
  frontend::AlignResult aligned;
  try {
    aligned = aligner.align(match->local_map.scene, query->local_map.scene, candidate.initial_guess);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateAlignment) throw;
    result.reason = "alignment degenerate";
    return result;
  }
  result.relative = aligned.pose;
  result.chi2 = aligned.stats.chi2;
  result.inlier_ratio = aligned.stats.inlier_ratio();
  result.mean_residual = aligned.stats.mean_residual();
  result.inliers = aligned.stats.inliers();

  const Pose2 correction = geometry::between(candidate.initial_guess, aligned.pose);
  if (result.inlier_ratio < thresholds.min_inlier_ratio) {
    result.reason = "inlier ratio " + std::to_string(result.inlier_ratio);
  } else if (result.mean_residual > thresholds.max_mean_residual) {
    result.reason = "mean residual " + std::to_string(result.mean_residual);
  } else if (correction.translation().norm() > thresholds.max_correction_translation ||
             std::abs(correction.theta) > thresholds.max_correction_rotation) {
    result.reason = "correction too large";
  } else {
    result.accepted = true;
  }
  return result;
}

solver::SolverStats optimize(PoseGraph& graph, const solver::SolverSettings& settings) {
  if (graph.nodes.empty()) throw Error(ErrorCode::InvalidArgument, "cannot optimize an empty graph");
  std::vector<solver::Variable> vars;
  vars.reserve(graph.nodes.size());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    vars.push_back({static_cast<int>(graph.nodes[i].id), graph.nodes[i].pose, i == 0});
  }
  std::vector<solver::Factor> factors;
  factors.reserve(graph.edges.size());
  for (const auto& e : graph.edges) {
    factors.push_back(solver::relative_pose(static_cast<int>(e.from), static_cast<int>(e.to), e.measurement,
                                            e.information));
  }
  const auto stats = solver::solve(vars, factors, settings);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) graph.nodes[i].pose = vars[i].estimate;
  return stats;
}

std::vector<StampedPose> world_trajectory(const PoseGraph& graph) {
  std::vector<StampedPose> out;
  for (const auto& n : graph.nodes) {
    for (const auto& s : n.local_map.trajectory) out.push_back({s.timestamp, compose(n.pose, s.pose)});
  }
  return out;
}

// ---------------------------------------------------------------- files

namespace {

constexpr std::string_view kGraphClass = "PoseGraph";
constexpr std::string_view kNodeClass = "GraphNode";
constexpr std::string_view kEdgeClass = "GraphEdge";

std::string_view kind_name(EdgeKind k) { return k == EdgeKind::Odometry ? "odometry" : "loop"; }

[[noreturn]] void parse_fail(const core::SerializedObject& obj, const std::string& what) {
  throw Error(ErrorCode::ParseError, "graph line " + std::to_string(obj.line) + ": " + what);
}

template <typename T>
const T& field(const core::PropertyContainer& c, const char* name, const core::SerializedObject& obj) {
  try {
    return c.get<T>(name);
  } catch (const Error& e) {
    parse_fail(obj, std::string("field '") + name + "': " + e.what());
  }
}

}  // namespace

std::string serialize_graph(const PoseGraph& graph) {
  core::ObjectWriter w;
  Json header = Json::object();
  header["nodes"] = graph.nodes.size();
  header["edges"] = graph.edges.size();
  w.write(kGraphClass, w.reserve_id(), std::move(header));

  for (const auto& n : graph.nodes) {
    std::size_t points = 0;
    for (const auto& p : n.local_map.scene) {
      if (const auto* c = std::get_if<PointCloud2>(&p.value)) points += c->size();
    }
    std::vector<double> times;
    std::vector<double> poses;
    for (const auto& s : n.local_map.trajectory) {
      times.push_back(s.timestamp);
      poses.insert(poses.end(), {s.pose.x, s.pose.y, s.pose.theta});
    }
    Json fields = Json::object();
    fields["node"] = n.id;
    fields["pose"] = w.encode(n.pose);
    fields["origin"] = w.encode(n.local_map.origin);
    fields["scene"] = w.encode(core::NestedContainer(n.local_map.scene));
    fields["scene_points"] = points;
    fields["trajectory_t"] = w.encode(times);
    fields["trajectory"] = w.encode(poses);
    w.write(kNodeClass, w.reserve_id(), std::move(fields));
  }
  for (const auto& e : graph.edges) {
    Json fields = Json::object();
    fields["from"] = e.from;
    fields["to"] = e.to;
    fields["kind"] = kind_name(e.kind);
    fields["measurement"] = w.encode(e.measurement);
    std::vector<double> info;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) info.push_back(e.information(r, c));
    }
    fields["information"] = w.encode(info);
    w.write(kEdgeClass, w.reserve_id(), std::move(fields));
  }
  return w.text();
}

PoseGraph deserialize_graph(std::string_view text) {
  core::ObjectReader reader(text);
  const auto& objects = reader.objects();
  if (objects.empty() || objects.front().class_name != kGraphClass) {
    throw Error(ErrorCode::ParseError, "graph file must start with a PoseGraph header");
  }
  const auto& header = objects.front();
  const auto count = [&](const char* key) -> std::size_t {
    if (!header.fields.contains(key) || !header.fields[key].is_number_unsigned()) {
      parse_fail(header, std::string("header needs a count '") + key + "'");
    }
    return header.fields[key].get<std::size_t>();
  };
  const std::size_t node_count = count("nodes");
  const std::size_t edge_count = count("edges");

  PoseGraph graph;
  for (std::size_t i = 1; i < objects.size(); ++i) {
    const auto& obj = objects[i];
    if (obj.class_name == core::kContainerClass) continue;
    if (obj.class_name == kNodeClass) {
      if (!graph.edges.empty()) parse_fail(obj, "nodes must precede edges");
      const auto f = reader.decode_fields(obj);
      GraphNode n;
      n.id = field<std::int64_t>(f, "node", obj);
      if (!graph.nodes.empty() && n.id <= graph.nodes.back().id) parse_fail(obj, "node ids must increase");
      n.pose = field<Pose2>(f, "pose", obj);
      n.local_map.id = n.id;
      n.local_map.origin = field<Pose2>(f, "origin", obj);
      n.local_map.scene = field<core::PropertyContainer>(f, "scene", obj);
      const auto& times = field<std::vector<double>>(f, "trajectory_t", obj);
      const auto& poses = field<std::vector<double>>(f, "trajectory", obj);
      if (poses.size() != 3 * times.size()) parse_fail(obj, "trajectory needs 3 values per timestamp");
      for (std::size_t k = 0; k < times.size(); ++k) {
        n.local_map.trajectory.push_back({times[k], Pose2(poses[3 * k], poses[3 * k + 1], poses[3 * k + 2])});
      }
      graph.nodes.push_back(std::move(n));
    } else if (obj.class_name == kEdgeClass) {
      const auto f = reader.decode_fields(obj);
      GraphEdge e;
      e.from = field<std::int64_t>(f, "from", obj);
      e.to = field<std::int64_t>(f, "to", obj);
      for (const auto id : {e.from, e.to}) {
        if (graph.find(id) == nullptr) {
          throw Error(ErrorCode::DanglingReference,
                      "graph line " + std::to_string(obj.line) + ": edge names missing node " + std::to_string(id));
        }
      }
      if (e.from == e.to) parse_fail(obj, "edge endpoints must differ");
      const auto& kind = field<std::string>(f, "kind", obj);
      if (kind == "odometry") {
        e.kind = EdgeKind::Odometry;
      } else if (kind == "loop") {
        e.kind = EdgeKind::Loop;
      } else {
        parse_fail(obj, "unknown edge kind '" + kind + "'");
      }
      e.measurement = field<Pose2>(f, "measurement", obj);
      const auto& info = field<std::vector<double>>(f, "information", obj);
      if (info.size() != 9) parse_fail(obj, "information needs 9 values");
      for (int k = 0; k < 9; ++k) e.information(k / 3, k % 3) = info[k];
      graph.edges.push_back(e);
    } else if (obj.class_name == kGraphClass) {
      parse_fail(obj, "second PoseGraph header");
    } else {
      throw Error(ErrorCode::UnknownClass, "graph line " + std::to_string(obj.line) + ": unknown class '" +
                                               obj.class_name + "'");
    }
  }
  if (graph.nodes.size() != node_count || graph.edges.size() != edge_count) {
    parse_fail(header, "header counts do not match the file");
  }
  return graph;
}

}  // namespace mcslam::graph
