#include "mcslam/eval/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mcslam/core/error.hpp"
#include "mcslam/core/serialization.hpp"

namespace mcslam::eval {

using core::format_double;
using geometry::Vector2;

void validate(const Trajectory& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i].timestamp) || !t[i].pose.is_finite()) {
      throw Error(ErrorCode::InvalidArgument, "trajectory sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(t[i].timestamp > t[i - 1].timestamp)) {
      throw Error(ErrorCode::InvalidArgument, "trajectory timestamps must strictly increase");
    }
  }
}

std::string format_tum(const Trajectory& t) {
  std::string out;
  for (const auto& s : t) {
    const double h = 0.5 * s.pose.theta;
    out += format_double(s.timestamp) + ' ' + format_double(s.pose.x) + ' ' + format_double(s.pose.y) + " 0 0 0 " +
           format_double(std::sin(h)) + ' ' + format_double(std::cos(h)) + '\n';
  }
  return out;
}

Trajectory parse_tum(std::string_view text) {
  Trajectory out;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);
    ++number;
    const auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::ParseError, "TUM line " + std::to_string(number) + ": " + what);
    };

    double v[8];
    int count = 0;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string_view::npos || line[pos] == '#') continue;
    while (pos != std::string_view::npos) {
      if (count == 8) fail("expected 8 numbers");
      const char* first = line.data() + pos;
      const char* last = line.data() + line.size();
      const auto [ptr, ec] = std::from_chars(first, last, v[count]);
      if (ec != std::errc() || (ptr != last && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) fail("bad number");
      ++count;
      pos = line.find_first_not_of(" \t\r", static_cast<std::size_t>(ptr - line.data()));
    }
    if (count != 8) fail("expected 8 numbers");
    const double qx = v[4], qy = v[5], qz = v[6], qw = v[7];
    const double yaw = std::atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz));
    if (!out.empty() && !(v[0] > out.back().timestamp)) fail("timestamps must strictly increase");
    out.push_back({v[0], Pose2(v[1], v[2], yaw)});
  }
  validate(out);
  return out;
}

std::vector<PosePair> associate(const Trajectory& gt, const Trajectory& est, double max_dt) {
  if (!(max_dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_dt must be > 0");
  std::vector<PosePair> pairs;
  for (const auto& e : est) {
    const auto it = std::lower_bound(gt.begin(), gt.end(), e.timestamp,
                                     [](const StampedPose& s, double t) { return s.timestamp < t; });
    const StampedPose* best = nullptr;
    if (it != gt.begin()) best = &*std::prev(it);
    if (it != gt.end() && (best == nullptr || it->timestamp - e.timestamp < e.timestamp - best->timestamp)) {
      best = &*it;
    }
    if (best != nullptr && std::abs(best->timestamp - e.timestamp) <= max_dt) pairs.push_back({*best, e});
  }
  if (pairs.empty()) throw Error(ErrorCode::NoPairs, "no estimate lies within max_dt of a ground-truth sample");
  return pairs;
}

Pose2 align_trajectories(const std::vector<PosePair>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::DegenerateAlignment, "no pairs to align");
  Vector2 me = Vector2::Zero();
  Vector2 mg = Vector2::Zero();
  for (const auto& p : pairs) {
    me += p.est.pose.translation();
    mg += p.gt.pose.translation();
  }
  me /= static_cast<double>(pairs.size());
  mg /= static_cast<double>(pairs.size());
  double dot = 0.0;
  double cross = 0.0;
  double spread = 0.0;
  for (const auto& p : pairs) {
    const Vector2 e = p.est.pose.translation() - me;
    const Vector2 g = p.gt.pose.translation() - mg;
    dot += e.dot(g);
    cross += e.x() * g.y() - e.y() * g.x();
    spread += e.squaredNorm();
  }
  if (spread == 0.0) throw Error(ErrorCode::DegenerateAlignment, "estimated positions all coincide");
  const double theta = std::atan2(cross, dot);
  const Pose2 rotation(0.0, 0.0, theta);
  const Vector2 t = mg - geometry::rotate(rotation, me);
  return {t.x(), t.y(), theta};
}

double ate(const std::vector<PosePair>& pairs, const Pose2& alignment) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "ate needs at least one pair");
  double sum = 0.0;
  for (const auto& p : pairs) {
    sum += (geometry::transform_point(alignment, p.est.pose.translation()) - p.gt.pose.translation()).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

RelativeError rpe(const std::vector<PosePair>& pairs, std::size_t delta) {
  if (delta < 1 || pairs.size() <= delta) {
    throw Error(ErrorCode::InvalidArgument, "rpe needs delta >= 1 and more than delta pairs");
  }
  double st = 0.0;
  double sr = 0.0;
  const std::size_t n = pairs.size() - delta;
  for (std::size_t i = 0; i < n; ++i) {
    const Pose2 g = geometry::between(pairs[i].gt.pose, pairs[i + delta].gt.pose);
    const Pose2 e = geometry::between(pairs[i].est.pose, pairs[i + delta].est.pose);
    const Pose2 err = geometry::between(g, e);
    st += err.translation().squaredNorm();
    sr += err.theta * err.theta;
  }
  return {std::sqrt(st / static_cast<double>(n)), std::sqrt(sr / static_cast<double>(n))};
}

double path_length(const Trajectory& t) {
  double len = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) len += (t[i].pose.translation() - t[i - 1].pose.translation()).norm();
  return len;
}

MetricReport evaluate(const Trajectory& gt, const Trajectory& est, const EvalOptions& options) {
  const auto pairs = associate(gt, est, options.max_dt);
  const Pose2 alignment = options.align ? align_trajectories(pairs) : Pose2::identity();
  MetricReport r;
  r.pairs = pairs.size();
  r.ate_rmse = ate(pairs, alignment);
  if (pairs.size() > options.delta) {
    const auto rel = rpe(pairs, options.delta);
    r.rpe_rmse_trans = rel.translation;
    r.rpe_rmse_rot = rel.rotation;
  }
  r.trajectory_length = path_length(gt);
  return r;
}

std::string format_report(const MetricReport& r) {
  core::Json j = core::Json::object();
  j["ate_rmse"] = r.ate_rmse;
  j["rpe_rmse_trans"] = r.rpe_rmse_trans;
  j["rpe_rmse_rot"] = r.rpe_rmse_rot;
  j["frame_rate"] = r.frame_rate;
  j["trajectory_length"] = r.trajectory_length;
  j["pairs"] = r.pairs;
  return j.dump();
}

}  // namespace mcslam::eval
