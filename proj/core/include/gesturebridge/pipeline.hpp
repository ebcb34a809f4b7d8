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

// Utterance-to-motion routing: gesture sentences drive the mimic path from
// pose landmarks, everything else the generated-motion path from BVH.

#ifndef GESTUREBRIDGE_PIPELINE_HPP_
#define GESTUREBRIDGE_PIPELINE_HPP_

#include <string>
#include <string_view>

#include "gesturebridge/bvh.hpp"
#include "gesturebridge/bvh_retarget.hpp"
#include "gesturebridge/gsd.hpp"
#include "gesturebridge/llm.hpp"
#include "gesturebridge/pose.hpp"
#include "gesturebridge/robot_profile.hpp"
#include "gesturebridge/trajectory.hpp"

namespace gb {

struct PipelineConfig {
  BackendConfig backend;
  // Empty paths mean the bundled defaults.
  std::string template_path;
  std::string profile_path;
  std::string mapping_path;
  double speed_scale = kDefaultSpeedScale;
  int downsample_factor = kDefaultDownsampleFactor;  // BVH path
  int pose_downsample_factor = 1;
  int concurrency = 4;
  std::string output_dir = ".";

  // Throws kConfig on bad factors or a referenced file that does not exist.
  void Validate() const;
};

// YAML. Relative paths resolve against `base_dir`.
PipelineConfig ParsePipelineConfig(std::string_view yaml_text, const std::string& base_dir = "");
PipelineConfig LoadPipelineConfig(const std::string& path);

struct RouteResult {
  ClassificationResult classification;
  JointTrajectory trajectory;
  std::string provenance;  // "mimic" or "generated"
};

struct RouteInputs {
  std::string sentence_id = "utterance";
  std::string sentence;
  const PoseSequence* landmarks = nullptr;
  const BvhDocument* bvh = nullptr;
};

// Classifies the sentence, then retargets landmarks (mimic) or BVH
// (generated). Throws kRouting naming the fired path when its input is
// missing, and SafetyError if the conditioned output still violates limits.
RouteResult Route(const RouteInputs& in, const Backend& backend, const PromptTemplate& tmpl,
                  const RobotProfile& profile, const JointMapping& mapping,
                  const PipelineConfig& config);

// Joint angle vs. time line plot, one polyline per joint.
std::string TrajectorySvg(const JointTrajectory& traj, const RobotProfile& profile,
                          const std::string& title);

}  // namespace gb

#endif  // GESTUREBRIDGE_PIPELINE_HPP_
