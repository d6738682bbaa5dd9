#include "mcslam/eval/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mcslam/pipeline/builtins.hpp"
#include "mcslam/pipeline/pipeline.hpp"

namespace mcslam::eval {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

RunResult run_dataset(std::string_view config_text, const std::vector<frontend::DatasetRecord>& records,
                      std::size_t checkpoint_every,
                      const std::function<void(std::size_t, const graph::PoseGraph&)>& checkpoint) {
  const auto root = config::instantiate(config_text, pipeline::builtin_registry());
  auto* pipe = dynamic_cast<pipeline::Pipeline*>(root.get());
  if (pipe == nullptr) {
    throw Error(ErrorCode::ParamKindMismatch, "config root is a " + root->class_name() + ", not a Pipeline");
  }
  const auto raw = frontend::assemble_packets(records, pipe->assembly());

  RunResult result;
  using Clock = std::chrono::steady_clock;
  Clock::duration busy{};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto start = Clock::now();
    try {
      pipe->process(raw[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "packet " + std::to_string(i) + ": " + e.what());
    }
    busy += Clock::now() - start;
    if (checkpoint && checkpoint_every > 0 && pipe->packets() % checkpoint_every == 0) {
      checkpoint(pipe->packets(), pipe->graph());
    }
  }
  const auto start = Clock::now();
  pipe->finish();
  busy += Clock::now() - start;

  result.packets = pipe->packets();
  result.seconds = std::chrono::duration<double>(busy).count();
  result.trajectory = pipe->trajectory();
  result.graph = pipe->graph();
  return result;
}

MetricReport run_pipeline(const RunFiles& files) {
  const std::string config = read_file(files.config);
  const auto records = frontend::parse_dataset(read_file(files.dataset));
  std::optional<Trajectory> gt;
  if (files.ground_truth) gt = parse_tum(read_file(*files.ground_truth));

  const auto dir = std::filesystem::path(files.graph).parent_path();
  const auto result = run_dataset(config, records, files.save_graph_every,
                                  [&](std::size_t step, const graph::PoseGraph& g) {
                                    const auto name = "graph_" + std::to_string(step) + ".json";
                                    write_file((dir / name).string(), graph::serialize_graph(g));
                                  });

  write_file(files.trajectory, format_tum(result.trajectory));
  write_file(files.graph, graph::serialize_graph(result.graph));
  write_file(files.map, render_svg(result.graph, result.trajectory, gt ? &*gt : nullptr));

  MetricReport report;
  if (gt) report = evaluate(*gt, result.trajectory, files.eval);
  report.frame_rate = result.frame_rate();
  return report;
}

// ---------------------------------------------------------------- SVG

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const graph::PoseGraph& graph, const Trajectory& estimate, const Trajectory* ground_truth) {
  constexpr double kScale = 40.0;  // pixels per meter
  constexpr double kMargin = 20.0;

  geometry::PointCloud2 world;
  for (const auto& n : graph.nodes) {
    for (const auto& p : n.local_map.scene) {
      if (const auto* c = std::get_if<geometry::PointCloud2>(&p.value)) {
        for (const auto& q : c->points) world.push_back(geometry::transform_point(n.pose, q));
      }
    }
  }
  const auto points = geometry::voxel_decimate(world, 0.05).points;

  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x;
  double hi_x = -lo_x;
  double hi_y = -lo_x;
  const auto grow = [&](const geometry::Vector2& p) {
    lo_x = std::min(lo_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_x = std::max(hi_x, p.x());
    hi_y = std::max(hi_y, p.y());
  };
  for (const auto& p : points) grow(p);
  for (const auto& s : estimate) grow(s.pose.translation());
  if (ground_truth != nullptr) {
    for (const auto& s : *ground_truth) grow(s.pose.translation());
  }
  if (!(lo_x <= hi_x)) lo_x = lo_y = hi_x = hi_y = 0.0;

  const double width = (hi_x - lo_x) * kScale + 2.0 * kMargin;
  const double height = (hi_y - lo_y) * kScale + 2.0 * kMargin;
  const auto px = [&](double x) { return fixed((x - lo_x) * kScale + kMargin); };
  const auto py = [&](double y) { return fixed((hi_y - y) * kScale + kMargin); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) + "\" height=\"" +
                    fixed(height) + "\" viewBox=\"0 0 " + fixed(width) + ' ' + fixed(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<g fill=\"black\">\n";
  for (const auto& p : points) out += "<rect x=\"" + px(p.x()) + "\" y=\"" + py(p.y()) + "\" width=\"1\" height=\"1\"/>\n";
  out += "</g>\n";

  const auto polyline = [&](const Trajectory& t, const char* color) {
    out += "<polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i > 0) out += ' ';
      out += px(t[i].pose.x) + ',' + py(t[i].pose.y);
    }
    out += "\"/>\n";
  };
  if (ground_truth != nullptr) polyline(*ground_truth, "gray");
  polyline(estimate, "blue");

  for (const auto& e : graph.edges) {
    if (e.kind != graph::EdgeKind::Loop) continue;
    const auto* a = graph.find(e.from);
    const auto* b = graph.find(e.to);
    out += "<line stroke=\"red\" stroke-width=\"1\" x1=\"" + px(a->pose.x) + "\" y1=\"" + py(a->pose.y) + "\" x2=\"" +
           px(b->pose.x) + "\" y2=\"" + py(b->pose.y) + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace mcslam::eval
