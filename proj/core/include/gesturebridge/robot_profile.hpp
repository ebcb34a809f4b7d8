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

#ifndef GESTUREBRIDGE_ROBOT_PROFILE_HPP_
#define GESTUREBRIDGE_ROBOT_PROFILE_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gb {

inline constexpr std::size_t kJointCount = 12;

// One row of a trajectory: an angle per profile joint, radians.
using JointVector = std::array<double, kJointCount>;

// Safe envelope of a single actuated joint.
struct JointSpec {
  std::string name;
  double min_angle = 0.0;     // rad
  double max_angle = 0.0;     // rad
  double max_velocity = 0.0;  // rad/s
};

// The 12-joint kinematic envelope. Joint order is the canonical column order
// of every trajectory built against this profile.
class RobotProfile {
 public:
  // Throws gb::Error(kConfig) unless there are exactly 12 joints with unique
  // names, min < max and max_velocity > 0.
  RobotProfile(std::string name, std::vector<JointSpec> joints);

  const std::string& name() const { return name_; }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const JointSpec& joint(std::size_t i) const { return joints_.at(i); }

  std::optional<std::size_t> IndexOf(std::string_view joint_name) const;

 private:
  std::string name_;
  std::vector<JointSpec> joints_;
};

// Joint names of the default upper-body profile, in column order.
const std::array<std::string_view, kJointCount>& DefaultJointNames();

// Profile files are YAML:
//
//   name: pepper
//   joints:
//     - {name: HeadYaw, min: -2.0857, max: 2.0857, vmax: 7.33}
//     ...
//
// See docs/formats.md for the full grammar.
RobotProfile ParseRobotProfile(std::string_view yaml_text);
RobotProfile LoadRobotProfile(const std::string& path);

}  // namespace gb

#endif  // GESTUREBRIDGE_ROBOT_PROFILE_HPP_
