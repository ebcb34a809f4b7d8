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

// Shared helpers and independent oracles for the unit and acceptance tests.
// Nothing here calls into the library code under test except for loading
// inputs.

#ifndef GESTUREBRIDGE_TESTS_TEST_SUPPORT_HPP_
#define GESTUREBRIDGE_TESTS_TEST_SUPPORT_HPP_

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gesturebridge/file_io.hpp"
#include "gesturebridge/gsd.hpp"
#include "gesturebridge/llm.hpp"
#include "gesturebridge/pose.hpp"
#include "gesturebridge/robot_profile.hpp"
#include "gesturebridge/trajectory.hpp"
#include "json.hpp"

namespace gb::test {

inline std::string FixturePath(const std::string& rel) {
  return std::string(GB_TEST_FIXTURE_DIR) + "/" + rel;
}

inline std::string DataPath(const std::string& rel) {
  return std::string(GB_TEST_DATA_DIR) + "/" + rel;
}

inline RobotProfile DefaultProfile() { return LoadRobotProfile(DataPath("pepper_profile.yaml")); }

inline PromptTemplate DefaultTemplate() {
  return LoadPromptTemplate(DataPath("gsd_template.yaml"));
}

// Round numbers so expected values can be worked by hand: every joint is
// limited to [-1, 1] rad and 10 rad/s.
inline RobotProfile RoundProfile(double lo = -1.0, double hi = 1.0, double vmax = 10.0) {
  std::vector<JointSpec> joints;
  for (std::string_view n : DefaultJointNames()) joints.push_back({std::string(n), lo, hi, vmax});
  return RobotProfile("round", std::move(joints));
}

inline RobotProfile UnlimitedProfile() {
  return RoundProfile(-1e9, 1e9, 1e12);
}

inline JointTrajectory MakeTrajectory(const std::vector<double>& times,
                                      const std::vector<JointVector>& rows) {
  JointTrajectory t;
  t.profile_name = "round";
  for (std::size_t i = 0; i < times.size(); ++i) t.frames.push_back({times[i], rows[i]});
  return t;
}

inline JointVector Fill(double v) {
  JointVector a;
  a.fill(v);
  return a;
}

// n frames, strictly increasing random intervals, angles within +-spread.
inline JointTrajectory RandomTrajectory(std::mt19937_64& rng, std::size_t n, double spread) {
  std::uniform_real_distribution<double> dt(0.005, 0.2);
  std::uniform_real_distribution<double> ang(-spread, spread);
  JointTrajectory t;
  double now = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    JointFrame f;
    f.timestamp = now;
    for (double& a : f.angles) a = ang(rng);
    t.frames.push_back(f);
    now += dt(rng);
  }
  return t;
}

struct OracleViolation {
  std::size_t frame;
  std::size_t joint;
};

// Straight double loop over every frame pair and joint.
inline std::vector<OracleViolation> BruteForceViolations(const JointTrajectory& t,
                                                         const RobotProfile& p) {
  std::vector<OracleViolation> out;
  for (std::size_t i = 1; i < t.frames.size(); ++i) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const double d = t.frames[i].angles[j] - t.frames[i - 1].angles[j];
      const double v = (d < 0 ? -d : d) / (t.frames[i].timestamp - t.frames[i - 1].timestamp);
      if (v > p.joint(j).max_velocity) out.push_back({i - 1, j});
    }
  }
  return out;
}

inline double BruteForcePeak(const JointTrajectory& t) {
  double peak = 0.0;
  for (std::size_t i = 1; i < t.frames.size(); ++i) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const double v = std::fabs(t.frames[i].angles[j] - t.frames[i - 1].angles[j]) /
                       (t.frames[i].timestamp - t.frames[i - 1].timestamp);
      peak = std::max(peak, v);
    }
  }
  return peak;
}

// --- pose forward model ----------------------------------------------------
//
// Torso coordinates: x toward the subject's left, y up, z forward. Angles
// are turned into landmarks with explicit rotation matrices; the library
// goes the other way with its own vector formulas.

struct ArmPose {
  double pitch = 0.0;  // shoulder pitch, 0 forward, +pi/2 down
  double roll = 0.0;   // shoulder roll, + toward subject's left
  double bend = 0.0;   // interior elbow angle, >= 0
  double twist = 0.0;  // elbow yaw
};

struct BodyPose {
  ArmPose left;
  ArmPose right;
  double head_yaw = 0.0;
  double head_pitch = 0.0;
};

inline Eigen::Matrix3d Rx(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix(); }
inline Eigen::Matrix3d Ry(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY()).toRotationMatrix(); }

// Upper-arm direction: Rx(pitch) Ry(roll) applied to forward.
inline Eigen::Vector3d UpperArmDir(const ArmPose& a) {
  return Rx(a.pitch) * Ry(a.roll) * Eigen::Vector3d::UnitZ();
}

// Forearm: bend u toward -up (or the forward fallback), then spin about u.
inline Eigen::Vector3d ForearmDir(const ArmPose& a) {
  const Eigen::Vector3d u = UpperArmDir(a);
  Eigen::Vector3d axis = u.cross(Eigen::Vector3d::UnitY());
  if (axis.norm() < 1e-9) axis = u.cross(Eigen::Vector3d::UnitZ());
  axis.normalize();
  const Eigen::Vector3d f0 = Eigen::AngleAxisd(a.bend, axis) * u;
  return Eigen::AngleAxisd(a.twist, u) * f0;
}

inline Eigen::Vector3d HeadDir(double yaw, double pitch) {
  return Ry(yaw) * Rx(pitch) * Eigen::Vector3d::UnitY();
}

struct Placement {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double scale = 1.0;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Vector3d Apply(const Eigen::Vector3d& p) const {
    return rotation * (scale * p) + translation;
  }
};

inline LandmarkFrame SynthesizeFrame(const BodyPose& b, const Placement& at = {}, double t = 0.0) {
  const Eigen::Vector3d ls(0.2, 0.5, 0.0), rs(-0.2, 0.5, 0.0);
  const Eigen::Vector3d lh(0.15, 0.0, 0.0), rh(-0.15, 0.0, 0.0);
  const double upper = 0.28, fore = 0.25;
  const Eigen::Vector3d le = ls + upper * UpperArmDir(b.left);
  const Eigen::Vector3d lw = le + fore * ForearmDir(b.left);
  const Eigen::Vector3d re = rs + upper * UpperArmDir(b.right);
  const Eigen::Vector3d rw = re + fore * ForearmDir(b.right);
  const Eigen::Vector3d nose = 0.5 * (ls + rs) + 0.25 * HeadDir(b.head_yaw, b.head_pitch);
  LandmarkFrame f;
  f.timestamp = t;
  const std::map<std::string, Eigen::Vector3d> pts = {
      {"nose", nose},      {"left_shoulder", ls}, {"right_shoulder", rs},
      {"left_elbow", le},  {"right_elbow", re},   {"left_wrist", lw},
      {"right_wrist", rw}, {"left_hip", lh},      {"right_hip", rh}};
  for (const auto& [name, p] : pts) f.points[name] = Landmark{at.Apply(p), 0.99};
  return f;
}

// Expected joint vector in DefaultJointNames() order:
// HeadYaw HeadPitch LShoulderPitch LShoulderRoll LElbowYaw LElbowRoll
// LWristYaw RShoulderPitch RShoulderRoll RElbowYaw RElbowRoll RWristYaw.
inline JointVector ExpectedAngles(const BodyPose& b) {
  return {b.head_yaw,    b.head_pitch, b.left.pitch,  b.left.roll,  b.left.twist,  -b.left.bend, 0.0,
          b.right.pitch, b.right.roll, b.right.twist, b.right.bend, 0.0};
}

inline Eigen::Matrix3d RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

// Reflect x -> -x and swap left/right landmark names.
inline LandmarkFrame Mirror(const LandmarkFrame& f) {
  LandmarkFrame m;
  m.timestamp = f.timestamp;
  for (const auto& [name, lm] : f.points) {
    std::string n = name;
    if (n.rfind("left_", 0) == 0) n = "right_" + n.substr(5);
    else if (n.rfind("right_", 0) == 0) n = "left_" + n.substr(6);
    Landmark l = lm;
    l.position.x() = -l.position.x();
    m.points[n] = l;
  }
  return m;
}

// --- mock fixtures ---------------------------------------------------------

// {text, response} JSONL -> fingerprint map for the given template.
inline FixtureMap FixturesFromResponses(const std::string& path, const PromptTemplate& tmpl) {
  FixtureMap out;
  const std::string text = ReadFile(path);
  for (std::string_view line : SplitLines(text)) {
    if (Trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    out[PromptFingerprint(BuildPrompt(tmpl, j.at("text").get<std::string>()))] =
        j.at("response").get<std::string>();
  }
  return out;
}

// --- CLI -------------------------------------------------------------------

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the gb binary through the shell, capturing stdout and stderr.
inline CommandResult RunGb(const std::string& args, const std::string& scratch) {
  const std::string out_path = scratch + "/stdout.txt";
  const std::string err_path = scratch + "/stderr.txt";
  const std::string cmd = std::string("\"") + GB_TEST_CLI + "\" " + args + " >\"" + out_path +
                          "\" 2>\"" + err_path + "\"";
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(out_path);
  r.err = ReadFile(err_path);
  return r;
}

}  // namespace gb::test

#endif  // GESTUREBRIDGE_TESTS_TEST_SUPPORT_HPP_
