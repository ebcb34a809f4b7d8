/*
 * Copyright 2026 The GestureBridge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gesturebridge/pose.hpp"

#include <glog/logging.h>

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <optional>

#include "gesturebridge/file_io.hpp"
#include "json.hpp"

namespace gb {

namespace {

// Relative tolerance below which a direction is considered undefined.
constexpr double kDegenerate = 1e-9;
// Below this bend (rad) the elbow counts as straight and its yaw is
// unobservable; landmark rounding alone would swing it by radians.
constexpr double kStraightElbow = 0.05;

using Eigen::Vector3d;

struct ArmAngles {
  double shoulder_pitch = 0.0;
  double shoulder_roll = 0.0;
  double elbow_yaw = 0.0;
  double elbow_roll = 0.0;
};

void RequireVisible(const LandmarkFrame& frame, std::string_view name,
                    double threshold) {
  const Landmark& lm = frame.at(name);
  if (lm.visibility < threshold) {
    throw Error(ErrorCode::kGeometry, "landmark " + std::string(name) +
                                          " below visibility threshold at t=" +
                                          std::to_string(frame.timestamp));
  }
}

// u and f are upper-arm and forearm vectors in torso coordinates
// (x = right, y = up, z = forward).
ArmAngles SolveArm(const Vector3d& u, const Vector3d& f, bool left) {
  const double ulen = u.norm();
  if (ulen < kDegenerate) throw Error(ErrorCode::kGeometry, "zero-length upper arm");
  const Vector3d uh = u / ulen;

  ArmAngles a;
  const double sagittal = std::hypot(uh.y(), uh.z());
  a.shoulder_pitch = sagittal < kDegenerate ? 0.0 : std::atan2(-uh.y(), uh.z());
  a.shoulder_roll = std::asin(std::clamp(uh.x(), -1.0, 1.0));

  const double bend = std::atan2(u.cross(f).norm(), u.dot(f));
  a.elbow_roll = left ? -bend : bend;

  const Vector3d f_perp = f - f.dot(uh) * uh;
  if (bend >= kStraightElbow && f_perp.norm() > kDegenerate * std::max(f.norm(), 1.0)) {
    Vector3d ref = Vector3d::UnitY() - uh.y() * uh;
    if (ref.norm() < 1e-6) ref = Vector3d::UnitZ() - uh.z() * uh;
    ref.normalize();
    a.elbow_yaw = std::atan2(uh.dot(ref.cross(f_perp)), ref.dot(f_perp));
  }
  return a;
}

}  // namespace

const Landmark& LandmarkFrame::at(std::string_view name) const {
  const auto it = points.find(name);
  if (it == points.end()) {
    throw Error(ErrorCode::kInput, "missing landmark " + std::string(name));
  }
  return it->second;
}

PoseSequence ParsePoseJsonl(std::string_view text) {
  using nlohmann::json;
  PoseSequence seq;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = Trim(lines[i]);
    if (line.empty()) continue;
    const int line_no = static_cast<int>(i) + 1;
    LandmarkFrame frame;
    try {
      const json j = json::parse(line);
      frame.timestamp = j.at("t").get<double>();
      const json& pts = j.at("points");
      for (std::string_view name : kRequiredLandmarks) {
        const auto it = pts.find(std::string(name));
        if (it == pts.end()) {
          throw ParseError("missing required landmark '" + std::string(name) + "'", line_no);
        }
        Landmark lm;
        lm.position = {it->at("x").get<double>(), it->at("y").get<double>(),
                       it->at("z").get<double>()};
        lm.visibility = it->contains("v") ? it->at("v").get<double>() : 1.0;
        if (!(lm.visibility >= 0.0 && lm.visibility <= 1.0)) {
          throw ParseError("visibility of '" + std::string(name) + "' outside [0, 1]",
                           line_no);
        }
        frame.points.emplace(std::string(name), lm);
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("landmark frame: ") + e.what(), line_no);
    }
    if (!seq.frames.empty() && !(frame.timestamp > seq.frames.back().timestamp)) {
      throw Error(ErrorCode::kOrdering, "line " + std::to_string(line_no) +
                                            ": landmark timestamps must strictly increase");
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

PoseSequence LoadPoseSequence(const std::string& path) {
  return ParsePoseJsonl(ReadFile(path));
}

Eigen::Matrix3d TorsoBasis::WorldToTorso() const {
  Eigen::Matrix3d m;
  m.row(0) = right.transpose();
  m.row(1) = up.transpose();
  m.row(2) = forward.transpose();
  return m;
}

TorsoBasis ComputeTorsoFrame(const LandmarkFrame& frame, double visibility_threshold) {
  for (std::string_view name : {"left_shoulder", "right_shoulder", "left_hip", "right_hip"}) {
    RequireVisible(frame, name, visibility_threshold);
  }
  const Vector3d ls = frame.at("left_shoulder").position;
  const Vector3d rs = frame.at("right_shoulder").position;
  const Vector3d lh = frame.at("left_hip").position;
  const Vector3d rh = frame.at("right_hip").position;

  const Vector3d across = ls - rs;
  const double width = across.norm();
  const Vector3d spine = 0.5 * (ls + rs) - 0.5 * (lh + rh);
  const double scale = std::max(width, spine.norm());
  if (width <= kDegenerate * std::max(scale, 1.0)) {
    throw Error(ErrorCode::kGeometry, "shoulders coincide");
  }
  TorsoBasis b;
  b.right = across / width;
  Vector3d fwd = b.right.cross(spine);
  if (fwd.norm() <= kDegenerate * std::max(spine.norm(), 1.0) || spine.norm() == 0.0) {
    throw Error(ErrorCode::kGeometry, "spine is parallel to the shoulder line");
  }
  b.forward = fwd.normalized();
  b.up = b.forward.cross(b.right);
  return b;
}

JointVector ComputeJointAngles(const LandmarkFrame& frame, double visibility_threshold) {
  for (std::string_view name : kRequiredLandmarks) {
    RequireVisible(frame, name, visibility_threshold);
  }
  const TorsoBasis basis = ComputeTorsoFrame(frame, visibility_threshold);
  const Eigen::Matrix3d to_torso = basis.WorldToTorso();
  auto pos = [&](std::string_view name) -> Vector3d {
    return to_torso * frame.at(name).position;
  };

  const Vector3d ls = pos("left_shoulder"), rs = pos("right_shoulder");
  const ArmAngles left =
      SolveArm(pos("left_elbow") - ls, pos("left_wrist") - pos("left_elbow"), true);
  const ArmAngles right =
      SolveArm(pos("right_elbow") - rs, pos("right_wrist") - pos("right_elbow"), false);

  // Inverse of n = Ry(yaw) * Rx(pitch) * up with |yaw| <= pi/2: a nose
  // straight above the shoulder midpoint is (0, 0).
  const Vector3d n = pos("nose") - 0.5 * (ls + rs);
  const double horizontal = std::hypot(n.x(), n.z());
  double head_yaw = 0.0, head_pitch = 0.0;
  if (horizontal > kDegenerate * std::max(n.norm(), 1.0)) {
    const double side = n.z() < 0.0 ? -1.0 : 1.0;
    head_yaw = std::atan2(side * n.x(), side * n.z());
    head_pitch = std::atan2(side * horizontal, n.y());
  }

  // Order matches DefaultJointNames().
  return {head_yaw,          head_pitch,        left.shoulder_pitch,
          left.shoulder_roll, left.elbow_yaw,   left.elbow_roll,
          0.0,               right.shoulder_pitch, right.shoulder_roll,
          right.elbow_yaw,   right.elbow_roll,  0.0};
}

JointTrajectory PoseToJointSpace(const PoseSequence& seq, const RobotProfile& profile,
                                 double visibility_threshold, std::size_t* held_frames) {
  if (seq.frames.empty()) throw Error(ErrorCode::kEmptyInput, "empty landmark sequence");

  // Column of each default joint in the profile.
  std::array<std::size_t, kJointCount> column{};
  for (std::size_t k = 0; k < kJointCount; ++k) {
    const auto idx = profile.IndexOf(DefaultJointNames()[k]);
    if (!idx) {
      throw Error(ErrorCode::kMapping, "profile " + profile.name() + " lacks joint " +
                                           std::string(DefaultJointNames()[k]) +
                                           " required by pose retargeting");
    }
    column[k] = *idx;
  }

  auto solve = [&](const LandmarkFrame& lf) -> std::optional<JointVector> {
    try {
      return ComputeJointAngles(lf, visibility_threshold);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kGeometry) throw;
      LOG(WARNING) << "unsolvable landmark frame at t=" << lf.timestamp << ": " << e.what();
      return std::nullopt;
    }
  };

  JointTrajectory traj;
  traj.profile_name = profile.name();
  traj.frames.reserve(seq.frames.size());
  std::size_t held = 0;
  for (const LandmarkFrame& lf : seq.frames) {
    JointFrame jf;
    jf.timestamp = lf.timestamp;
    if (auto angles = solve(lf)) {
      // A straight elbow keeps the last observed yaw instead of snapping to 0.
      if (!traj.frames.empty()) {
        for (const auto& [yaw, roll] : {std::pair{4, 5}, std::pair{9, 10}}) {
          if (std::abs((*angles)[roll]) < kStraightElbow) {
            (*angles)[yaw] = traj.frames.back().angles[column[yaw]];
          }
        }
      }
      for (std::size_t k = 0; k < kJointCount; ++k) jf.angles[column[k]] = (*angles)[k];
    } else if (traj.frames.empty()) {
      // Holding needs a previous pose; the first frame has none.
      const bool any_solvable = std::any_of(
          seq.frames.begin() + 1, seq.frames.end(),
          [&](const LandmarkFrame& f) { return solve(f).has_value(); });
      if (!any_solvable) throw Error(ErrorCode::kEmptyInput, "every landmark frame is degenerate");
      throw Error(ErrorCode::kGeometry, "first landmark frame cannot be solved");
    } else {
      jf.angles = traj.frames.back().angles;
      ++held;
    }
    traj.frames.push_back(jf);
  }
  if (held_frames != nullptr) *held_frames = held;
  return traj;
}

JointTrajectory RetargetPose(const PoseSequence& seq, const RobotProfile& profile,
                             const PoseRetargetOptions& options,
                             PoseRetargetReport* report) {
  std::size_t held = 0;
  const JointTrajectory raw =
      PoseToJointSpace(seq, profile, options.visibility_threshold, &held);
  ConditionReport cond;
  JointTrajectory out = Condition(ScaleTime(raw, options.speed_scale), profile,
                                  options.downsample_factor, &cond);
  if (report != nullptr) {
    report->held_frames = held;
    report->clamped_values = cond.clamped_values;
  }
  return out;
}

}  // namespace gb
