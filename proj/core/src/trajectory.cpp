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

#include "gesturebridge/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "gesturebridge/file_io.hpp"
#include "json.hpp"

namespace gb {

using nlohmann::json;

double JointTrajectory::duration() const {
  if (frames.size() < 2) return 0.0;
  return frames.back().timestamp - frames.front().timestamp;
}

namespace {

std::string DescribeViolations(const std::vector<VelocityViolation>& v) {
  std::ostringstream ss;
  ss << v.size() << " velocity violation(s)";
  const std::size_t shown = std::min<std::size_t>(v.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    ss << (i == 0 ? ": " : "; ") << v[i].joint_name << " at frame "
       << v[i].frame << " commanded " << v[i].velocity << " rad/s > "
       << v[i].limit;
  }
  if (shown < v.size()) ss << "; ...";
  return ss.str();
}

}  // namespace

SafetyError::SafetyError(std::vector<VelocityViolation> violations)
    : Error(ErrorCode::kSafety, DescribeViolations(violations)),
      violations_(std::move(violations)) {}

void ValidateTimestamps(const JointTrajectory& traj) {
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const double t = traj.frames[i].timestamp;
    if (!std::isfinite(t) || t < 0.0) {
      throw Error(ErrorCode::kOrdering,
                  "frame " + std::to_string(i) + " has invalid timestamp");
    }
    if (i > 0 && !(t > traj.frames[i - 1].timestamp)) {
      throw Error(ErrorCode::kOrdering,
                  "timestamps not strictly increasing at frame " + std::to_string(i));
    }
  }
}

JointTrajectory ClampTrajectory(const JointTrajectory& traj,
                                const RobotProfile& profile,
                                std::size_t* clamped_values) {
  JointTrajectory out = traj;
  std::size_t changed = 0;
  for (JointFrame& f : out.frames) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const JointSpec& spec = profile.joint(j);
      const double a = std::clamp(f.angles[j], spec.min_angle, spec.max_angle);
      if (a != f.angles[j]) ++changed;
      f.angles[j] = a;
    }
  }
  if (clamped_values != nullptr) *clamped_values = changed;
  return out;
}

std::size_t DownsampledFrameCount(std::size_t n, int factor) {
  if (n == 0) return 0;
  const std::size_t f = static_cast<std::size_t>(factor);
  const std::size_t steps = n - 1;
  return steps / f + 1 + (steps % f != 0 ? 1 : 0);
}

JointTrajectory Downsample(const JointTrajectory& traj, int factor) {
  if (factor < 1) throw Error(ErrorCode::kInput, "downsample factor must be >= 1");
  if (traj.empty()) throw Error(ErrorCode::kEmptyInput, "cannot downsample an empty trajectory");
  JointTrajectory out;
  out.profile_name = traj.profile_name;
  out.frames.reserve(DownsampledFrameCount(traj.size(), factor));
  const std::size_t step = static_cast<std::size_t>(factor);
  for (std::size_t i = 0; i < traj.size(); i += step) out.frames.push_back(traj.frames[i]);
  if ((traj.size() - 1) % step != 0) out.frames.push_back(traj.frames.back());
  return out;
}

std::vector<VelocityViolation> CheckVelocity(const JointTrajectory& traj,
                                             const RobotProfile& profile) {
  ValidateTimestamps(traj);
  std::vector<VelocityViolation> violations;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const JointFrame& a = traj.frames[i];
    const JointFrame& b = traj.frames[i + 1];
    const double dt = b.timestamp - a.timestamp;
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const double v = std::abs(b.angles[j] - a.angles[j]) / dt;
      const JointSpec& spec = profile.joint(j);
      if (v > spec.max_velocity) {
        violations.push_back({j, spec.name, i, v, spec.max_velocity});
      }
    }
  }
  return violations;
}

double PeakVelocity(const JointTrajectory& traj) {
  double peak = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double dt = traj.frames[i + 1].timestamp - traj.frames[i].timestamp;
    for (std::size_t j = 0; j < kJointCount; ++j) {
      peak = std::max(peak, std::abs(traj.frames[i + 1].angles[j] -
                                     traj.frames[i].angles[j]) / dt);
    }
  }
  return peak;
}

JointTrajectory ScaleTime(const JointTrajectory& traj, double speed_scale) {
  if (!(speed_scale > 0.0) || !std::isfinite(speed_scale)) {
    throw Error(ErrorCode::kInput, "speed scale must be a positive number");
  }
  JointTrajectory out = traj;
  if (out.empty()) return out;
  const double t0 = traj.frames.front().timestamp;
  for (JointFrame& f : out.frames) f.timestamp = t0 + speed_scale * (f.timestamp - t0);
  return out;
}

JointTrajectory Condition(const JointTrajectory& traj,
                          const RobotProfile& profile, int factor,
                          ConditionReport* report) {
  ValidateTimestamps(traj);
  std::size_t clamped = 0;
  JointTrajectory out = ClampTrajectory(Downsample(traj, factor), profile, &clamped);
  if (report != nullptr) {
    report->clamped_values = clamped;
    report->source_frames = traj.size();
  }
  auto violations = CheckVelocity(out, profile);
  if (!violations.empty()) throw SafetyError(std::move(violations));
  return out;
}

CommandDocument ExportCommands(const JointTrajectory& traj,
                               const RobotProfile& profile) {
  if (traj.empty()) throw Error(ErrorCode::kEmptyInput, "cannot export an empty trajectory");
  auto violations = CheckVelocity(traj, profile);
  if (!violations.empty()) throw SafetyError(std::move(violations));
  CommandDocument doc;
  doc.profile = profile.name();
  const double t0 = traj.frames.front().timestamp;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    JointCommand cmd;
    cmd.name = profile.joint(j).name;
    cmd.angles.reserve(traj.size());
    cmd.times.reserve(traj.size());
    for (const JointFrame& f : traj.frames) {
      cmd.angles.push_back(f.angles[j]);
      cmd.times.push_back(f.timestamp - t0);
    }
    doc.joints.push_back(std::move(cmd));
  }
  return doc;
}

JointTrajectory ImportCommands(const CommandDocument& doc,
                               const RobotProfile& profile) {
  if (doc.joints.size() != kJointCount) {
    throw Error(ErrorCode::kDimension, "command document has " +
                                           std::to_string(doc.joints.size()) +
                                           " joints, expected 12");
  }
  std::array<const JointCommand*, kJointCount> by_column{};
  for (const JointCommand& cmd : doc.joints) {
    const auto idx = profile.IndexOf(cmd.name);
    if (!idx) throw Error(ErrorCode::kDimension, "joint not in profile: " + cmd.name);
    if (by_column[*idx] != nullptr) {
      throw Error(ErrorCode::kDimension, "duplicate joint in command document: " + cmd.name);
    }
    by_column[*idx] = &cmd;
  }
  const JointCommand& first = *by_column[0];
  for (const JointCommand* cmd : by_column) {
    if (cmd->angles.size() != cmd->times.size() || cmd->times != first.times) {
      throw Error(ErrorCode::kDimension,
                  "joint " + cmd->name + " does not share the common time base");
    }
  }
  JointTrajectory traj;
  traj.profile_name = doc.profile;
  traj.frames.resize(first.times.size());
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    traj.frames[i].timestamp = first.times[i];
    for (std::size_t j = 0; j < kJointCount; ++j) {
      traj.frames[i].angles[j] = by_column[j]->angles[i];
    }
  }
  ValidateTimestamps(traj);
  return traj;
}

std::string CommandDocumentToJson(const CommandDocument& doc) {
  json j;
  j["profile"] = doc.profile;
  j["joints"] = json::array();
  for (const JointCommand& cmd : doc.joints) {
    j["joints"].push_back({{"name", cmd.name}, {"angles", cmd.angles}, {"times", cmd.times}});
  }
  return j.dump(2) + "\n";
}

CommandDocument CommandDocumentFromJson(std::string_view json_text) {
  CommandDocument doc;
  try {
    const json j = json::parse(json_text);
    doc.profile = j.at("profile").get<std::string>();
    for (const json& e : j.at("joints")) {
      doc.joints.push_back({e.at("name").get<std::string>(),
                            e.at("angles").get<std::vector<double>>(),
                            e.at("times").get<std::vector<double>>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("command document: ") + e.what());
  }
  return doc;
}

std::string TrajectoryToCsv(const JointTrajectory& traj,
                            const RobotProfile& profile) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "t";
  for (const JointSpec& j : profile.joints()) ss << ',' << j.name;
  ss << '\n';
  for (const JointFrame& f : traj.frames) {
    ss << f.timestamp;
    for (double a : f.angles) ss << ',' << a;
    ss << '\n';
  }
  return ss.str();
}

JointTrajectory TrajectoryFromCsv(std::string_view csv_text,
                                  const RobotProfile& profile) {
  const auto lines = SplitLines(csv_text);
  JointTrajectory traj;
  traj.profile_name = profile.name();
  std::array<std::size_t, kJointCount> column_of{};
  bool have_header = false;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view line = Trim(lines[ln]);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row{std::string(line)};
    while (std::getline(row, cell, ',')) cells.emplace_back(Trim(cell));
    const int line_no = static_cast<int>(ln) + 1;
    if (cells.size() != kJointCount + 1) {
      throw Error(ErrorCode::kDimension,
                  "line " + std::to_string(line_no) + ": expected 13 columns, got " +
                      std::to_string(cells.size()));
    }
    if (!have_header) {
      if (cells[0] != "t") throw ParseError("trajectory CSV must start with a 't' column", line_no);
      for (std::size_t c = 1; c < cells.size(); ++c) {
        const auto idx = profile.IndexOf(cells[c]);
        if (!idx) throw Error(ErrorCode::kDimension, "column not in profile: " + cells[c]);
        column_of[c - 1] = *idx;
      }
      have_header = true;
      continue;
    }
    JointFrame frame;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (cells[c].empty() || *end != '\0') {
        throw ParseError("non-numeric value '" + cells[c] + "'", line_no);
      }
      if (c == 0) {
        frame.timestamp = v;
      } else {
        frame.angles[column_of[c - 1]] = v;
      }
    }
    traj.frames.push_back(frame);
  }
  if (!have_header) throw ParseError("trajectory CSV has no header", 0);
  ValidateTimestamps(traj);
  return traj;
}

}  // namespace gb
