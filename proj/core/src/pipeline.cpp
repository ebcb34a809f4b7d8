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

#include "gesturebridge/pipeline.hpp"

#include <glog/logging.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <limits>
#include <sstream>

#include "gesturebridge/file_io.hpp"

namespace gb {

namespace fs = std::filesystem;

namespace {

std::string Resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || base_dir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

void RequireFile(const std::string& what, const std::string& path) {
  if (!path.empty() && !fs::is_regular_file(path)) {
    throw Error(ErrorCode::kConfig, what + " file not found: " + path);
  }
}

// Distinct hues for up to 12 series.
constexpr std::array<const char*, 12> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

}  // namespace

void PipelineConfig::Validate() const {
  backend.Validate();
  if (!(speed_scale > 0.0)) throw Error(ErrorCode::kConfig, "speed_scale must be > 0");
  if (downsample_factor < 1 || pose_downsample_factor < 1) {
    throw Error(ErrorCode::kConfig, "downsample factors must be >= 1");
  }
  if (concurrency < 1) throw Error(ErrorCode::kConfig, "concurrency must be >= 1");
  RequireFile("template", template_path);
  RequireFile("robot profile", profile_path);
  RequireFile("joint mapping", mapping_path);
}

PipelineConfig ParsePipelineConfig(std::string_view yaml_text, const std::string& base_dir) {
  PipelineConfig c;
  c.backend = ParseBackendConfig(yaml_text);
  try {
    const YAML::Node root = YAML::Load(std::string(yaml_text));
    if (root.IsNull()) return c;
    if (!root.IsMap()) throw Error(ErrorCode::kConfig, "pipeline config: expected a mapping");
    if (root["template"]) c.template_path = Resolve(base_dir, root["template"].as<std::string>());
    if (root["profile"]) c.profile_path = Resolve(base_dir, root["profile"].as<std::string>());
    if (root["mapping"]) c.mapping_path = Resolve(base_dir, root["mapping"].as<std::string>());
    if (root["speed_scale"]) c.speed_scale = root["speed_scale"].as<double>();
    if (root["downsample_factor"]) c.downsample_factor = root["downsample_factor"].as<int>();
    if (root["pose_downsample_factor"]) {
      c.pose_downsample_factor = root["pose_downsample_factor"].as<int>();
    }
    if (root["concurrency"]) c.concurrency = root["concurrency"].as<int>();
    if (root["output_dir"]) c.output_dir = Resolve(base_dir, root["output_dir"].as<std::string>());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, std::string("pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig LoadPipelineConfig(const std::string& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  return ParsePipelineConfig(text, fs::path(path).parent_path().string());
}

RouteResult Route(const RouteInputs& in, const Backend& backend, const PromptTemplate& tmpl,
                  const RobotProfile& profile, const JointMapping& mapping,
                  const PipelineConfig& config) {
  RouteResult r;
  r.classification = Classify(in.sentence_id, in.sentence, backend, tmpl);
  const std::string label(LabelName(r.classification.label));
  if (GestureTrigger(r.classification.label)) {
    r.provenance = "mimic";
    if (in.landmarks == nullptr) {
      throw Error(ErrorCode::kRouting, "sentence classified " + label +
                                           " fired the mimic path, but no landmark sequence "
                                           "was supplied");
    }
    PoseRetargetOptions opts;
    opts.speed_scale = config.speed_scale;
    opts.downsample_factor = config.pose_downsample_factor;
    r.trajectory = RetargetPose(*in.landmarks, profile, opts);
  } else {
    r.provenance = "generated";
    if (in.bvh == nullptr) {
      throw Error(ErrorCode::kRouting, "sentence classified " + label +
                                           " fired the generated-motion path, but no BVH "
                                           "motion was supplied");
    }
    ValidateMapping(mapping, *in.bvh, profile);
    r.trajectory = RetargetBvh(*in.bvh, mapping, profile, config.downsample_factor);
  }
  // Condition() already refuses unsafe output; this guards future paths.
  if (auto v = CheckVelocity(r.trajectory, profile); !v.empty()) throw SafetyError(std::move(v));
  LOG(INFO) << in.sentence_id << ": " << label << " -> " << r.provenance << " path, "
            << r.trajectory.size() << " keyframes";
  return r;
}

std::string TrajectorySvg(const JointTrajectory& traj, const RobotProfile& profile,
                          const std::string& title) {
  constexpr int kW = 900, kH = 420, kL = 60, kR = 170, kT = 40, kB = 50;
  const int pw = kW - kL - kR, ph = kH - kT - kB;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const JointFrame& f : traj.frames) {
    for (double a : f.angles) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  if (traj.empty()) lo = -1.0, hi = 1.0;
  if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
  const double t0 = traj.empty() ? 0.0 : traj.frames.front().timestamp;
  const double span = std::max(traj.duration(), 1e-9);
  auto x = [&](double t) { return kL + (t - t0) / span * pw; };
  auto y = [&](double a) { return kT + (hi - a) / (hi - lo) * ph; };

  std::ostringstream s;
  s.precision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kL + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << title << "</text>\n";
  s << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  s << "<text x=\"" << kL << "\" y=\"" << kH - 25 << "\">" << t0 << " s</text>\n";
  s << "<text x=\"" << kL + pw << "\" y=\"" << kH - 25 << "\" text-anchor=\"end\">"
    << t0 + traj.duration() << " s</text>\n";
  s << "<text x=\"" << kL - 5 << "\" y=\"" << kT + 10 << "\" text-anchor=\"end\">" << hi
    << "</text>\n";
  s << "<text x=\"" << kL - 5 << "\" y=\"" << kT + ph << "\" text-anchor=\"end\">" << lo
    << "</text>\n";
  s << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 8
    << "\" text-anchor=\"middle\">time (s) / angle (rad)</text>\n";
  for (std::size_t j = 0; j < kJointCount; ++j) {
    s << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[j]
      << "\" points=\"";
    for (const JointFrame& f : traj.frames) {
      s << x(f.timestamp) << "," << y(f.angles[j]) << " ";
    }
    s << "\"/>\n";
    const int ly = kT + 14 + static_cast<int>(j) * 16;
    s << "<line x1=\"" << kL + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kL + pw + 30
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << kPalette[j] << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << kL + pw + 35 << "\" y=\"" << ly << "\">" << profile.joint(j).name
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace gb
