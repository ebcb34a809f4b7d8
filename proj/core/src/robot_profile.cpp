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

#include "gesturebridge/robot_profile.hpp"

#include <yaml-cpp/yaml.h>

#include <set>

#include "gesturebridge/error.hpp"
#include "gesturebridge/file_io.hpp"

namespace gb {

RobotProfile::RobotProfile(std::string name, std::vector<JointSpec> joints)
    : name_(std::move(name)), joints_(std::move(joints)) {
  if (joints_.size() != kJointCount) {
    throw Error(ErrorCode::kConfig,
                "robot profile '" + name_ + "' must declare exactly 12 joints, got " +
                    std::to_string(joints_.size()));
  }
  std::set<std::string> seen;
  for (const JointSpec& j : joints_) {
    if (j.name.empty()) throw Error(ErrorCode::kConfig, "joint with empty name");
    if (!seen.insert(j.name).second) {
      throw Error(ErrorCode::kConfig, "duplicate joint name: " + j.name);
    }
    if (!(j.min_angle < j.max_angle)) {
      throw Error(ErrorCode::kConfig, "joint " + j.name + ": min must be < max");
    }
    if (!(j.max_velocity > 0.0)) {
      throw Error(ErrorCode::kConfig, "joint " + j.name + ": vmax must be > 0");
    }
  }
}

std::optional<std::size_t> RobotProfile::IndexOf(std::string_view joint_name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == joint_name) return i;
  }
  return std::nullopt;
}

const std::array<std::string_view, kJointCount>& DefaultJointNames() {
  static const std::array<std::string_view, kJointCount> kNames = {
      "HeadYaw",        "HeadPitch",      "LShoulderPitch", "LShoulderRoll",
      "LElbowYaw",      "LElbowRoll",     "LWristYaw",      "RShoulderPitch",
      "RShoulderRoll",  "RElbowYaw",      "RElbowRoll",     "RWristYaw"};
  return kNames;
}

namespace {

double RequireNumber(const YAML::Node& node, const char* key,
                     const std::string& joint) {
  const YAML::Node v = node[key];
  if (!v || !v.IsScalar()) {
    throw Error(ErrorCode::kConfig, "joint " + joint + ": missing '" + key + "'");
  }
  try {
    return v.as<double>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::kConfig,
                "joint " + joint + ": '" + key + "' is not a number");
  }
}

}  // namespace

RobotProfile ParseRobotProfile(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, std::string("robot profile: ") + e.what());
  }
  if (!root.IsMap()) throw Error(ErrorCode::kConfig, "robot profile: expected a mapping");
  const std::string name = root["name"] ? root["name"].as<std::string>() : "";
  if (name.empty()) throw Error(ErrorCode::kConfig, "robot profile: missing 'name'");
  const YAML::Node joints = root["joints"];
  if (!joints || !joints.IsSequence()) {
    throw Error(ErrorCode::kConfig, "robot profile: missing 'joints' list");
  }
  std::vector<JointSpec> specs;
  for (const YAML::Node& j : joints) {
    JointSpec spec;
    spec.name = j["name"] ? j["name"].as<std::string>() : "";
    spec.min_angle = RequireNumber(j, "min", spec.name);
    spec.max_angle = RequireNumber(j, "max", spec.name);
    spec.max_velocity = RequireNumber(j, "vmax", spec.name);
    specs.push_back(std::move(spec));
  }
  return RobotProfile(name, std::move(specs));
}

RobotProfile LoadRobotProfile(const std::string& path) {
  return ParseRobotProfile(ReadFile(path));
}

}  // namespace gb
