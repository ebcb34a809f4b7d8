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

#ifndef GESTUREBRIDGE_POSE_HPP_
#define GESTUREBRIDGE_POSE_HPP_

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gesturebridge/robot_profile.hpp"
#include "gesturebridge/trajectory.hpp"

namespace gb {

inline constexpr double kDefaultSpeedScale = 12.0;
inline constexpr double kDefaultVisibilityThreshold = 0.5;

// Landmark names follow the 33-point full-body convention; only these are
// read.
inline constexpr std::array<std::string_view, 9> kRequiredLandmarks = {
    "nose",       "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist",   "left_hip",       "right_hip"};

struct Landmark {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double visibility = 1.0;  // [0, 1]
};

struct LandmarkFrame {
  double timestamp = 0.0;  // s
  std::map<std::string, Landmark, std::less<>> points;

  // Throws kInput if the landmark is absent.
  const Landmark& at(std::string_view name) const;
};

struct PoseSequence {
  std::vector<LandmarkFrame> frames;
};

// JSON lines, one frame per line: {"t": s, "points": {name: {x, y, z, v}}}.
PoseSequence ParsePoseJsonl(std::string_view text);
PoseSequence LoadPoseSequence(const std::string& path);

// Right-handed orthonormal torso basis. `right` points from the subject's
// right shoulder to the left shoulder, `up` from the hip midpoint to the
// shoulder midpoint (re-orthogonalized), forward = right x up.
struct TorsoBasis {
  Eigen::Vector3d right;
  Eigen::Vector3d up;
  Eigen::Vector3d forward;

  // Rows are the basis vectors: maps world directions into
  // (right, up, forward) coordinates.
  Eigen::Matrix3d WorldToTorso() const;
};

// Throws kGeometry on degenerate geometry or if a shoulder/hip landmark is
// below the visibility threshold.
TorsoBasis ComputeTorsoFrame(const LandmarkFrame& frame,
                             double visibility_threshold = kDefaultVisibilityThreshold);

// Angles in the order of DefaultJointNames(). Conventions, per side, with
// u = elbow - shoulder and f = wrist - elbow in torso coordinates:
//   ShoulderPitch  atan2(-u.up, u.forward): 0 arm forward, +pi/2 arm down.
//                  Defined as 0 when u has no sagittal component.
//   ShoulderRoll   asin(u.right / |u|): positive toward the subject's left,
//                  so the left arm abducts positive and the right negative.
//   ElbowRoll      angle between u and f (0 for a straight arm), negative on
//                  the left and positive on the right.
//   ElbowYaw       rotation of f about u, measured from the half-plane that
//                  contains u and torso-up (torso-forward when u is
//                  vertical). 0 when the bend is under 0.05 rad.
//   WristYaw       0; landmarks cannot resolve pronation.
// Head, with n = nose - shoulder midpoint:
//   HeadYaw, HeadPitch  the (yaw, pitch) with |yaw| <= pi/2 for which
//                  n is parallel to Ry(yaw) * Rx(pitch) * up. Both 0 when n
//                  is vertical; positive pitch tilts forward.
// Throws kGeometry if any required landmark is below the threshold.
JointVector ComputeJointAngles(const LandmarkFrame& frame,
                               double visibility_threshold = kDefaultVisibilityThreshold);

struct PoseRetargetOptions {
  double speed_scale = kDefaultSpeedScale;
  int downsample_factor = 1;
  double visibility_threshold = kDefaultVisibilityThreshold;
};

struct PoseRetargetReport {
  std::size_t held_frames = 0;  // frames that reused the previous angles
  std::size_t clamped_values = 0;
};

// Angles per landmark frame, with low-visibility or degenerate frames
// holding the previous frame's angles. A straight elbow keeps the previous
// frame's ElbowYaw. Timestamps are not scaled. Throws if
// the first frame cannot be solved.
JointTrajectory PoseToJointSpace(const PoseSequence& seq,
                                 const RobotProfile& profile,
                                 double visibility_threshold = kDefaultVisibilityThreshold,
                                 std::size_t* held_frames = nullptr);

// PoseToJointSpace, then t' = t0 + speed_scale * (t - t0), then
// Condition(downsample_factor). Throws SafetyError on leftover violations.
JointTrajectory RetargetPose(const PoseSequence& seq, const RobotProfile& profile,
                             const PoseRetargetOptions& options = {},
                             PoseRetargetReport* report = nullptr);

}  // namespace gb

#endif  // GESTUREBRIDGE_POSE_HPP_
