#include "mcslam/pipeline/builtins.hpp"

#include "mcslam/frontend/aligner.hpp"
#include "mcslam/frontend/preprocess.hpp"
#include "mcslam/frontend/tracker.hpp"
#include "mcslam/graph/graph_slam.hpp"
#include "mcslam/pipeline/pipeline.hpp"

namespace mcslam::pipeline {

using config::ConfigurablePtr;
using config::SlotSpec;
using core::PropertyContainer;
using geometry::Pose2;

namespace {

class Params {
 public:
  template <typename T>
  Params& operator()(std::string_view name, T&& value) {
    c_.set(name, std::forward<T>(value));
    return *this;
  }
  operator PropertyContainer() const { return c_; }  // NOLINT(google-explicit-constructor)

 private:
  PropertyContainer c_;
};

}  // namespace

void register_builtins(config::Registry& r) {
  using namespace frontend;
  using namespace graph;

  r.add<Lidar2DPreprocessor>("Lidar2DPreprocessor", Params()("topic", kFrontTopic)("sensor_in_base", Pose2())(
                                                         "voxel_resolution", 0.025)("normal_neighbors", 8));
  r.add<OdometryPreprocessor>("OdometryPreprocessor", {});

  r.add<IlsSolver>("IlsSolver", Params()("max_iterations", 20)("damping", 1e-4)("chi2_epsilon", 1e-12)(
                                    "dense_threshold", 300));
  r.add<CorrespondenceFinder>("CorrespondenceFinder", Params()("normal_angle", 0.5));
  r.add<Lidar2DAlignerSlice>("Lidar2DAlignerSlice",
                             Params()("cue", kFrontTopic)("huber_delta", 1.0)("information", 100.0),
                             {{"finder"}});
  r.add<OdometryAlignerSlice>("OdometryAlignerSlice", Params()("cue", kOdomCue)(
                                                          "information", std::vector<double>{2500.0, 2500.0, 10000.0}));
  r.add<MultiAligner>("MultiAligner", Params()("outer_iterations", 10)("gate_start", 0.5)("gate_end", 0.1)(
                                          "min_inliers", 10)("max_condition", 1e8),
                      {{"solver"}, {"slices", false, true}});

  r.add<PointCloudMerger>("PointCloudMerger", Params()("resolution", 0.05)("max_points", 20000));
  r.add<MapClipper>("MapClipper", Params()("radius", 10.0));
  r.add<LocalMapSplitter>("LocalMapSplitter", Params()("max_translation", 1.0)("max_rotation", 0.5));
  r.add<Lidar2DTrackerSlice>("Lidar2DTrackerSlice", Params()("cue", kFrontTopic), {{"merger"}});
  r.add<MultiTracker>("MultiTracker", {},
                      {{"aligner"}, {"slices", false, true}, {"clipper"}, {"splitter"}});

  r.add<LoopDetector>("LoopDetector", Params()("search_radius", 3.0)("exclude_recent", 5)("max_candidates", 3));
  r.add<LoopValidator>("LoopValidator", Params()("min_inlier_ratio", 0.5)("max_mean_residual", 0.1)(
                                            "max_correction_translation", 2.0)("max_correction_rotation", 1.0),
                       {{"aligner"}});
  r.add<GlobalOptimizer>("GlobalOptimizer", {}, {{"solver"}});
  r.add<GraphSlam>("GraphSlam", Params()("odometry_information", std::vector<double>{100.0, 100.0, 400.0})(
                                    "loop_scale_min", 0.1)("loop_scale_max", 10.0),
                   {{"detector"}, {"validator"}, {"optimizer"}});

  r.add<Pipeline>("Pipeline", Params()("primary_topic", kFrontTopic)("sync_window", 0.05),
                  {{"preprocessors", false, true}, {"tracker"}, {"graph"}});
}

const config::Registry& builtin_registry() {
  static const config::Registry registry = [] {
    config::Registry r;
    register_builtins(r);
    return r;
  }();
  return registry;
}

std::vector<std::string> preset_names() { return {"lidar-single", "lidar-dual", "lidar-dual-odom"}; }

ConfigurablePtr build_preset(std::string_view name) {
  bool dual = false;
  bool odom = false;
  if (name == "lidar-dual") {
    dual = true;
  } else if (name == "lidar-dual-odom") {
    dual = odom = true;
  } else if (name != "lidar-single") {
    throw Error(ErrorCode::InvalidArgument, "unknown preset '" + std::string(name) + "'");
  }
  const auto& r = builtin_registry();
  const auto make = [&](std::string_view cls) { return r.create(cls); };

  auto pipeline = make("Pipeline");
  auto tracker = make("MultiTracker");
  auto aligner = make("MultiAligner");
  auto solver = make("IlsSolver");
  auto finder = make("CorrespondenceFinder");
  auto merger = make("PointCloudMerger");
  aligner->set_slot("solver", solver);

  std::vector<ConfigurablePtr> scan_slices;
  const auto add_lidar = [&](std::string_view topic, const Pose2& mount) {
    auto pre = make("Lidar2DPreprocessor");
    pre->set_param("topic", std::string(topic));
    pre->set_param("sensor_in_base", mount);
    pipeline->add_to_slot("preprocessors", pre);

    auto slice = make("Lidar2DAlignerSlice");
    slice->set_param("cue", std::string(topic));
    slice->set_slot("finder", finder);
    aligner->add_to_slot("slices", slice);
    scan_slices.push_back(slice);

    auto tslice = make("Lidar2DTrackerSlice");
    tslice->set_param("cue", std::string(topic));
    tslice->set_slot("merger", merger);
    tracker->add_to_slot("slices", tslice);
  };
  add_lidar(kFrontTopic, kFrontMount);
  if (dual) add_lidar(kRearTopic, kRearMount);
  if (odom) {
    pipeline->add_to_slot("preprocessors", make("OdometryPreprocessor"));
    aligner->add_to_slot("slices", make("OdometryAlignerSlice"));
  }
  tracker->set_slot("aligner", aligner);
  tracker->set_slot("clipper", make("MapClipper"));
  tracker->set_slot("splitter", make("LocalMapSplitter"));

  // loops: wider gate, scan slices and solver shared with the tracker
  auto loop_aligner = make("MultiAligner");
  loop_aligner->set_param("outer_iterations", 15);
  loop_aligner->set_param("gate_start", 1.0);
  loop_aligner->set_slot("solver", solver);
  loop_aligner->set_slot_list("slices", scan_slices);
  auto validator = make("LoopValidator");
  validator->set_slot("aligner", loop_aligner);

  auto graph_solver = make("IlsSolver");
  graph_solver->set_param("max_iterations", 50);
  auto optimizer = make("GlobalOptimizer");
  optimizer->set_slot("solver", graph_solver);

  auto graph = make("GraphSlam");
  graph->set_slot("detector", make("LoopDetector"));
  graph->set_slot("validator", validator);
  graph->set_slot("optimizer", optimizer);

  pipeline->set_slot("tracker", tracker);
  pipeline->set_slot("graph", graph);
  config::finalize(*pipeline);
  return pipeline;
}

std::string preset_config(std::string_view name) { return config::write_config(*build_preset(name)); }

}  // namespace mcslam::pipeline
