// Serial reference kernels against their OpenMP counterparts. Each row
// checks that both produce identical output. The normal and correspondence
// references search exhaustively, so their ratio includes the k-d tree gain;
// rerun with --threads 1 to separate it from the threading gain.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "mcslam/geometry/correspondence.hpp"
#include "mcslam/geometry/normals.hpp"
#include "mcslam/sim/simulator.hpp"

using namespace mcslam;
using geometry::PointCloud2;
using geometry::Pose2;
using geometry::Vector2;

namespace {

double seconds_per_call(const std::function<void()>& f, int reps) {
  f();
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

// Noisy samples along a closed polyline, the shape a scan produces.
PointCloud2 wall_cloud(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.005);
  const std::vector<Vector2> corners = {{-6, -4}, {6, -4}, {6, 1}, {2, 1}, {2, 4}, {-6, 4}};
  PointCloud2 c;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i % corners.size();
    const Vector2& a = corners[k];
    const Vector2& b = corners[(k + 1) % corners.size()];
    c.push_back(a + u(rng) * (b - a) + Vector2(noise(rng), noise(rng)));
  }
  return c;
}

struct Row {
  const char* kernel;
  std::size_t size;
  double serial;
  double parallel;
  bool same;
};

void print(const Row& r) {
  std::printf("%-16s %8zu %12.3f %12.3f %8.2fx  %s\n", r.kernel, r.size, r.serial * 1e3, r.parallel * 1e3,
              r.serial / r.parallel, r.same ? "ok" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP kernel timings"};
  int threads = omp_get_max_threads();
  int reps = 5;
  std::size_t points = 4000;
  int rays = 20000;
  app.add_option("--threads", threads, "OpenMP threads for the parallel kernels")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Timed repetitions per kernel")->check(CLI::PositiveNumber);
  app.add_option("--points", points, "Cloud size for normals and correspondences")->check(CLI::PositiveNumber);
  app.add_option("--rays", rays, "Rays per cast")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  omp_set_num_threads(threads);

  std::mt19937_64 rng(12345);
  const PointCloud2 fixed = geometry::estimate_normals(wall_cloud(rng, points), 8).cloud;
  const PointCloud2 moving = geometry::estimate_normals(wall_cloud(rng, points), 8).cloud;
  const Pose2 guess(0.05, -0.03, 0.02);
  const geometry::CorrespondenceGates gates;

  std::printf("threads %d, reps %d\n", threads, reps);
  std::printf("%-16s %8s %12s %12s %9s\n", "kernel", "size", "serial ms", "openmp ms", "speedup");

  {
    geometry::NormalEstimate a;
    geometry::NormalEstimate b;
    const PointCloud2 raw = wall_cloud(rng, points);
    const double s = seconds_per_call([&] { a = geometry::estimate_normals_reference(raw, 8); }, reps);
    const double p = seconds_per_call([&] { b = geometry::estimate_normals(raw, 8); }, reps);
    print({"normals", points, s, p, a.cloud == b.cloud && a.flagged == b.flagged});
  }
  {
    std::vector<geometry::Correspondence> a;
    std::vector<geometry::Correspondence> b;
    const double s =
        seconds_per_call([&] { a = geometry::find_correspondences_reference(fixed, moving, guess, gates); }, reps);
    const geometry::CorrespondenceFinder finder(fixed);
    const double p = seconds_per_call([&] { b = finder.find(moving, guess, gates); }, reps);
    print({"correspondences", points, s, p, a == b});
  }
  {
    const auto world = sim::builtin_world("office");
    std::vector<double> dirs;
    for (int i = 0; i < rays; ++i) dirs.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * i / rays);
    const Vector2 origin(3.0, 2.0);
    std::vector<double> a;
    std::vector<double> b;
    const double s = seconds_per_call([&] { a = sim::cast_rays_reference(world, origin, dirs, 10.0); }, reps);
    const double p = seconds_per_call([&] { b = sim::cast_rays(world, origin, dirs, 10.0); }, reps);
    print({"ray casting", static_cast<std::size_t>(rays), s, p, a == b});
  }
  return 0;
}
