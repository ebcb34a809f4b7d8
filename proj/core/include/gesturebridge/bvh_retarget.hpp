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

#ifndef GESTUREBRIDGE_BVH_RETARGET_HPP_
#define GESTUREBRIDGE_BVH_RETARGET_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gesturebridge/bvh.hpp"
#include "gesturebridge/robot_profile.hpp"
#include "gesturebridge/trajectory.hpp"

namespace gb {

inline constexpr int kDefaultDownsampleFactor = 12;

// robot_angle = scale * radians(bvh_degrees) + offset
struct MappingEntry {
  std::string robot_joint;
  std::string bvh_joint;
  BvhChannel channel = BvhChannel::kZrotation;
  double scale = 1.0;
  double offset = 0.0;  // rad
};

struct JointMapping {
  std::vector<MappingEntry> entries;
  // Angle for robot joints with no entry; absent joints use 0 rad.
  std::map<std::string, double, std::less<>> neutral;

  double NeutralFor(std::string_view robot_joint) const;
};

// Mapping files are YAML; see docs/formats.md.
//
//   mappings:
//     - {robot: LShoulderPitch, bvh: LeftArm, channel: Xrotation, scale: 1, offset: 0}
//   neutral:
//     LShoulderRoll: 0.1
JointMapping ParseJointMapping(std::string_view yaml_text);
JointMapping LoadJointMapping(const std::string& path);

// Throws kMapping naming the offending entry when a robot joint is unknown
// or repeated, or the BVH joint/channel does not resolve.
void ValidateMapping(const JointMapping& mapping, const BvhDocument& doc,
                     const RobotProfile& profile);

// Unconditioned joint-space trajectory, one frame per BVH frame at
// timestamp i * frame_time.
JointTrajectory BvhToJointSpace(const BvhDocument& doc,
                                const JointMapping& mapping,
                                const RobotProfile& profile);

// BvhToJointSpace followed by Condition(factor). Throws SafetyError if the
// downsampled, clamped output still exceeds a velocity limit.
JointTrajectory RetargetBvh(const BvhDocument& doc, const JointMapping& mapping,
                            const RobotProfile& profile,
                            int factor = kDefaultDownsampleFactor,
                            ConditionReport* report = nullptr);

}  // namespace gb

#endif  // GESTUREBRIDGE_BVH_RETARGET_HPP_
