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

#include "gesturebridge/bvh_retarget.hpp"

#include <yaml-cpp/yaml.h>

#include <numbers>
#include <set>

#include "gesturebridge/file_io.hpp"

namespace gb {

double JointMapping::NeutralFor(std::string_view robot_joint) const {
  const auto it = neutral.find(robot_joint);
  return it == neutral.end() ? 0.0 : it->second;
}

namespace {

std::string Describe(const MappingEntry& e) {
  return e.robot_joint + " <- " + e.bvh_joint + "." + std::string(ChannelName(e.channel));
}

}  // namespace

JointMapping ParseJointMapping(std::string_view yaml_text) {
  JointMapping mapping;
  try {
    const YAML::Node root = YAML::Load(std::string(yaml_text));
    if (!root.IsMap()) throw Error(ErrorCode::kConfig, "joint mapping: expected a mapping");
    if (const YAML::Node rows = root["mappings"]) {
      for (const YAML::Node& row : rows) {
        MappingEntry e;
        e.robot_joint = row["robot"].as<std::string>();
        e.bvh_joint = row["bvh"].as<std::string>();
        const std::string ch = row["channel"].as<std::string>();
        const auto parsed = ParseChannelName(ch);
        if (!parsed) {
          throw Error(ErrorCode::kConfig,
                      "joint mapping: unknown channel '" + ch + "' for " + e.robot_joint);
        }
        e.channel = *parsed;
        if (row["scale"]) e.scale = row["scale"].as<double>();
        if (row["offset"]) e.offset = row["offset"].as<double>();
        mapping.entries.push_back(std::move(e));
      }
    }
    if (const YAML::Node neutral = root["neutral"]) {
      for (const auto& kv : neutral) {
        mapping.neutral[kv.first.as<std::string>()] = kv.second.as<double>();
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, std::string("joint mapping: ") + e.what());
  }
  return mapping;
}

JointMapping LoadJointMapping(const std::string& path) {
  return ParseJointMapping(ReadFile(path));
}

void ValidateMapping(const JointMapping& mapping, const BvhDocument& doc,
                     const RobotProfile& profile) {
  std::set<std::string> seen;
  for (const MappingEntry& e : mapping.entries) {
    if (!profile.IndexOf(e.robot_joint)) {
      throw Error(ErrorCode::kMapping, "mapping " + Describe(e) +
                                           ": robot joint not in profile " +
                                           profile.name());
    }
    if (!seen.insert(e.robot_joint).second) {
      throw Error(ErrorCode::kMapping,
                  "mapping " + Describe(e) + ": robot joint mapped more than once");
    }
    if (!IsRotation(e.channel)) {
      throw Error(ErrorCode::kMapping,
                  "mapping " + Describe(e) + ": only rotation channels can be retargeted");
    }
    try {
      ChannelColumn(doc, e.bvh_joint, e.channel);
    } catch (const Error& err) {
      throw Error(ErrorCode::kMapping, "mapping " + Describe(e) + ": " + err.what());
    }
  }
  for (const auto& [joint, angle] : mapping.neutral) {
    if (!profile.IndexOf(joint)) {
      throw Error(ErrorCode::kMapping, "neutral angle for unknown robot joint " + joint);
    }
  }
}

JointTrajectory BvhToJointSpace(const BvhDocument& doc,
                                const JointMapping& mapping,
                                const RobotProfile& profile) {
  ValidateMapping(mapping, doc, profile);

  JointVector neutral{};
  for (std::size_t j = 0; j < kJointCount; ++j) {
    neutral[j] = mapping.NeutralFor(profile.joint(j).name);
  }
  struct Resolved {
    std::size_t robot_column;
    std::size_t bvh_column;
    double scale;
    double offset;
  };
  std::vector<Resolved> resolved;
  for (const MappingEntry& e : mapping.entries) {
    resolved.push_back({*profile.IndexOf(e.robot_joint),
                        ChannelColumn(doc, e.bvh_joint, e.channel), e.scale, e.offset});
  }

  constexpr double kDegToRad = std::numbers::pi / 180.0;
  JointTrajectory traj;
  traj.profile_name = profile.name();
  traj.frames.resize(doc.frame_count);
  for (std::size_t f = 0; f < doc.frame_count; ++f) {
    JointFrame& frame = traj.frames[f];
    frame.timestamp = static_cast<double>(f) * doc.frame_time;
    frame.angles = neutral;
    for (const Resolved& r : resolved) {
      frame.angles[r.robot_column] = r.scale * (doc.value(f, r.bvh_column) * kDegToRad) + r.offset;
    }
  }
  return traj;
}

JointTrajectory RetargetBvh(const BvhDocument& doc, const JointMapping& mapping,
                            const RobotProfile& profile, int factor,
                            ConditionReport* report) {
  if (doc.frame_count == 0) {
    throw Error(ErrorCode::kEmptyInput, "BVH document has no motion frames");
  }
  return Condition(BvhToJointSpace(doc, mapping, profile), profile, factor, report);
}

}  // namespace gb
