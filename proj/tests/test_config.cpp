#include "doctest.h"
#include "mcslam/config/configurable.hpp"
#include "mcslam/core/error.hpp"
#include "mcslam/frontend/aligner.hpp"
#include "mcslam/pipeline/builtins.hpp"
#include "mcslam/pipeline/pipeline.hpp"

using namespace mcslam;
using namespace mcslam::config;
using core::PropertyContainer;

namespace {

class Leaf : public Configurable {
 public:
  void configure() override {
    gain = param<double>("gain");
    ++configured;
  }
  double gain = 0.0;
  int configured = 0;
};

class Node : public Configurable {
 public:
  void configure() override {
    child = slot_as<Leaf>("child");
    extra = slot_list_as<Leaf>("extra");
  }
  Leaf* child = nullptr;
  std::vector<Leaf*> extra;
};

Registry toy_registry() {
  Registry r;
  PropertyContainer leaf;
  leaf.set("gain", 1.0);
  leaf.set("name", std::string("leaf"));
  r.add<Leaf>("Leaf", leaf);
  r.add<Node>("Node", {}, {{"child"}, {"extra", true, true}});
  return r;
}

ErrorCode code_of(const std::string& text, const Registry& r) {
  try {
    instantiate(text, r);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error for: " << text);
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("registry basics") {
  Registry r = toy_registry();
  CHECK(r.contains("Leaf"));
  CHECK_FALSE(r.contains("Branch"));
  CHECK_THROWS_AS(r.add<Leaf>("Leaf", {}), Error);
  try {
    r.create("Branch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownClass);
  }
  auto m = r.create("Leaf");
  CHECK(m->class_name() == "Leaf");
  CHECK(m->param<double>("gain") == 1.0);
}

TEST_CASE("set_param checks name and kind") {
  Registry r = toy_registry();
  auto m = r.create("Leaf");
  m->set_param("gain", 2.5);
  CHECK(m->param<double>("gain") == 2.5);
  m->set_param("gain", std::int64_t{3});
  CHECK(m->param<double>("gain") == 3.0);
  try {
    m->set_param("gain", std::string("x"));
    FAIL("accepted a string");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParamKindMismatch);
  }
  try {
    m->set_param("bias", 1.0);
    FAIL("accepted an unknown name");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownParam);
  }
}

TEST_CASE("finalize wires, configures shared modules once and checks slots") {
  Registry r = toy_registry();
  auto node = r.create("Node");
  auto leaf = r.create("Leaf");
  leaf->set_param("gain", 4.0);

  try {
    finalize(*node);
    FAIL("missing slot accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingRequiredSlot);
  }

  node->set_slot("child", leaf);
  node->add_to_slot("extra", leaf);
  finalize(*node);
  auto* n = dynamic_cast<Node*>(node.get());
  REQUIRE(n->child != nullptr);
  CHECK(n->child->gain == 4.0);
  CHECK(n->extra.size() == 1);
  CHECK(n->extra[0] == n->child);
  CHECK(dynamic_cast<Leaf*>(leaf.get())->configured == 1);

  auto other = r.create("Node");
  other->set_slot("child", node);
  try {
    finalize(*other);
    FAIL("wrong module type accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParamKindMismatch);
  }
}

TEST_CASE("cycles built in memory are detected") {
  Registry r;
  r.add<Configurable>("Loop", {}, {{"next"}});
  auto a = r.create("Loop");
  auto b = r.create("Loop");
  a->set_slot("next", b);
  b->set_slot("next", a);
  try {
    finalize(*a);
    FAIL("cycle accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CycleDetected);
  }
}

TEST_CASE("instantiate a small tree") {
  Registry r = toy_registry();
  const std::string text =
      "{\"class\":\"Leaf\",\"id\":0,\"fields\":{\"gain\":7.5}}\n"
      "{\"class\":\"PropertyContainer\",\"id\":1,\"fields\":{\"0\":{\"$config\":0},\"1\":{\"$config\":0}}}\n"
      "{\"class\":\"Node\",\"id\":2,\"fields\":{\"child\":{\"$config\":0},\"extra\":{\"$ref\":1}},\"root\":true}\n";
  auto root = instantiate(text, r);
  auto* n = dynamic_cast<Node*>(root.get());
  REQUIRE(n != nullptr);
  CHECK(n->child->gain == 7.5);
  CHECK(n->extra.size() == 2);
  CHECK(n->extra[0] == n->child);
  CHECK(n->child->param<std::string>("name") == "leaf");

  const std::string written = write_config(*root);
  CHECK(write_config(*instantiate(written, r)) == written);
}

TEST_CASE("instantiate errors") {
  Registry r = toy_registry();
  const std::string leaf = "{\"class\":\"Leaf\",\"id\":0,\"fields\":{}}\n";
  CHECK(code_of(leaf, r) == ErrorCode::ParseError);
  CHECK(code_of("{\"class\":\"Leaf\",\"id\":0,\"fields\":{},\"root\":true}\n"
                "{\"class\":\"Leaf\",\"id\":1,\"fields\":{},\"root\":true}\n",
                r) == ErrorCode::ParseError);
  CHECK(code_of("{\"class\":\"Branch\",\"id\":0,\"fields\":{},\"root\":true}\n", r) == ErrorCode::UnknownClass);
  CHECK(code_of("{\"class\":\"Leaf\",\"id\":0,\"fields\":{\"bias\":1.0},\"root\":true}\n", r) ==
        ErrorCode::UnknownParam);
  CHECK(code_of("{\"class\":\"Leaf\",\"id\":0,\"fields\":{\"gain\":\"big\"},\"root\":true}\n", r) ==
        ErrorCode::ParamKindMismatch);
  CHECK(code_of("{\"class\":\"Node\",\"id\":0,\"fields\":{},\"root\":true}\n", r) == ErrorCode::MissingRequiredSlot);
  CHECK(code_of("{\"class\":\"Node\",\"id\":0,\"fields\":{\"child\":{\"$config\":5}},\"root\":true}\n", r) ==
        ErrorCode::DanglingReference);
  CHECK(code_of("{\"class\":\"Node\",\"id\":0,\"fields\":{\"child\":{\"$config\":0}},\"root\":true}\n", r) ==
        ErrorCode::CycleDetected);
  CHECK(code_of("{\"class\":\"Node\",\"id\":0,\"fields\":{\"child\":{\"$config\":1}}}\n"
                "{\"class\":\"Node\",\"id\":1,\"fields\":{\"child\":{\"$config\":0}},\"root\":true}\n",
                r) == ErrorCode::CycleDetected);
  CHECK(code_of(leaf + "{\"class\":\"Node\",\"id\":1,\"fields\":{\"child\":0},\"root\":true}\n", r) ==
        ErrorCode::ParamKindMismatch);
  CHECK(code_of("not json\n", r) == ErrorCode::ParseError);
}

TEST_CASE("built-in registry covers the module classes") {
  const auto& r = pipeline::builtin_registry();
  CHECK(r.class_names().size() >= 12);
  for (const char* name : {"Lidar2DPreprocessor", "OdometryPreprocessor", "IlsSolver", "CorrespondenceFinder",
                           "Lidar2DAlignerSlice", "OdometryAlignerSlice", "MultiAligner", "PointCloudMerger",
                           "MapClipper", "LocalMapSplitter", "Lidar2DTrackerSlice", "MultiTracker", "LoopDetector",
                           "LoopValidator", "GlobalOptimizer", "GraphSlam", "Pipeline"}) {
    CHECK_MESSAGE(r.contains(name), name);
  }
}

TEST_CASE("presets round-trip through config files") {
  for (const auto& name : pipeline::preset_names()) {
    CAPTURE(name);
    const std::string text = pipeline::preset_config(name);
    const auto root = instantiate(text, pipeline::builtin_registry());
    REQUIRE(dynamic_cast<pipeline::Pipeline*>(root.get()) != nullptr);
    CHECK(write_config(*root) == text);
  }
}

TEST_CASE("preset contents") {
  const auto count_slices = [](std::string_view name) {
    const auto root = pipeline::build_preset(name);
    const auto* aligner = root->slot("tracker")->slot_as<frontend::MultiAligner>("aligner");
    return aligner->slices().size();
  };
  CHECK(count_slices("lidar-single") == 1);
  CHECK(count_slices("lidar-dual") == 2);
  CHECK(count_slices("lidar-dual-odom") == 3);
  CHECK(pipeline::build_preset("lidar-dual")->slot_list("preprocessors").size() == 2);
  CHECK(pipeline::build_preset("lidar-dual-odom")->slot_list("preprocessors").size() == 3);
  CHECK_THROWS_AS(pipeline::build_preset("stereo"), Error);
}

TEST_CASE("shared modules are written once") {
  const std::string text = pipeline::preset_config("lidar-dual");
  std::size_t finders = 0;
  for (std::size_t pos = 0; (pos = text.find("\"class\":\"CorrespondenceFinder\"", pos)) != std::string::npos; ++pos) {
    ++finders;
  }
  CHECK(finders == 1);
}
