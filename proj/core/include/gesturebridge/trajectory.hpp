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

#ifndef GESTUREBRIDGE_TRAJECTORY_HPP_
#define GESTUREBRIDGE_TRAJECTORY_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gesturebridge/error.hpp"
#include "gesturebridge/robot_profile.hpp"

namespace gb {

struct JointFrame {
  double timestamp = 0.0;  // s
  JointVector angles{};    // rad, column i is profile joint i
};

// Timestamped n x 12 joint-angle matrix.
struct JointTrajectory {
  std::string profile_name;
  std::vector<JointFrame> frames;

  bool empty() const { return frames.empty(); }
  std::size_t size() const { return frames.size(); }
  // Last minus first timestamp; 0 for fewer than two frames.
  double duration() const;
};

struct VelocityViolation {
  std::size_t joint = 0;
  std::string joint_name;
  std::size_t frame = 0;  // index of the first frame of the offending pair
  double velocity = 0.0;  // |dtheta/dt|, rad/s
  double limit = 0.0;
};

// Raised when a trajectory would exceed a joint velocity limit.
class SafetyError : public Error {
 public:
  explicit SafetyError(std::vector<VelocityViolation> violations);

  const std::vector<VelocityViolation>& violations() const {
    return violations_;
  }

 private:
  std::vector<VelocityViolation> violations_;
};

// Throws kOrdering unless timestamps are non-negative and strictly
// increasing.
void ValidateTimestamps(const JointTrajectory& traj);

// Element-wise clamp into each joint's [min_angle, max_angle]. When
// clamped_values is non-null it receives the number of angles changed.
JointTrajectory ClampTrajectory(const JointTrajectory& traj,
                                const RobotProfile& profile,
                                std::size_t* clamped_values = nullptr);

// Keeps frames 0, f, 2f, ... at their original timestamps and always the
// final frame, so last-minus-first duration is preserved exactly.
JointTrajectory Downsample(const JointTrajectory& traj, int factor);

// Number of frames Downsample produces for n input frames.
std::size_t DownsampledFrameCount(std::size_t n, int factor);

// One entry per (consecutive frame pair, joint) whose commanded velocity
// exceeds the joint's max_velocity. Empty means safe.
std::vector<VelocityViolation> CheckVelocity(const JointTrajectory& traj,
                                             const RobotProfile& profile);

// Largest |dtheta/dt| over all joints and frame pairs.
double PeakVelocity(const JointTrajectory& traj);

// Multiplies every inter-frame interval by speed_scale, anchored at the
// first timestamp.
JointTrajectory ScaleTime(const JointTrajectory& traj, double speed_scale);

struct ConditionReport {
  std::size_t clamped_values = 0;
  std::size_t source_frames = 0;
};

// downsample -> clamp -> check. Throws SafetyError if any violation is left;
// never retimes to make a trajectory pass.
JointTrajectory Condition(const JointTrajectory& traj,
                          const RobotProfile& profile, int factor,
                          ConditionReport* report = nullptr);

// Per-joint (angle, time) lists consumed by the downstream motion
// controller. Times are relative to the first frame.
struct JointCommand {
  std::string name;
  std::vector<double> angles;  // rad
  std::vector<double> times;   // s
};

struct CommandDocument {
  std::string profile;
  std::vector<JointCommand> joints;
};

// Throws SafetyError if CheckVelocity reports anything.
CommandDocument ExportCommands(const JointTrajectory& traj,
                               const RobotProfile& profile);
JointTrajectory ImportCommands(const CommandDocument& doc,
                               const RobotProfile& profile);

std::string CommandDocumentToJson(const CommandDocument& doc);
CommandDocument CommandDocumentFromJson(std::string_view json_text);

// Plain CSV: header "t,<joint>,...", one frame per row.
std::string TrajectoryToCsv(const JointTrajectory& traj,
                            const RobotProfile& profile);
JointTrajectory TrajectoryFromCsv(std::string_view csv_text,
                                  const RobotProfile& profile);

}  // namespace gb

#endif  // GESTUREBRIDGE_TRAJECTORY_HPP_
