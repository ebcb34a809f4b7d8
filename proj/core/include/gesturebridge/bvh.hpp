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

#ifndef GESTUREBRIDGE_BVH_HPP_
#define GESTUREBRIDGE_BVH_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gesturebridge/error.hpp"

namespace gb {

enum class BvhChannel {
  kXposition,
  kYposition,
  kZposition,
  kXrotation,
  kYrotation,
  kZrotation,
};

std::string_view ChannelName(BvhChannel c);
std::optional<BvhChannel> ParseChannelName(std::string_view name);
bool IsRotation(BvhChannel c);

using Vec3 = std::array<double, 3>;

struct BvhJoint {
  std::string name;
  Vec3 offset{};
  std::vector<BvhChannel> channels;
  std::vector<BvhJoint> children;
  std::optional<Vec3> end_site;
};

// Parsed HIERARCHY + MOTION. Motion is stored row-major, one row per frame,
// columns in depth-first channel declaration order. Rotations are degrees.
struct BvhDocument {
  BvhJoint root;
  std::size_t frame_count = 0;
  double frame_time = 0.0;  // s
  std::size_t channel_count = 0;
  std::vector<double> motion;

  double value(std::size_t frame, std::size_t column) const {
    return motion[frame * channel_count + column];
  }
  double frame_rate() const { return 1.0 / frame_time; }
};

enum class BvhIssue {
  kMissingHierarchy,
  kMissingMotion,
  kSyntax,
  kRowLength,
  kNonNumeric,
  kFrameCount,
};

class BvhParseError : public ParseError {
 public:
  BvhParseError(BvhIssue issue, const std::string& message, int line)
      : ParseError(message, line), issue_(issue) {}

  BvhIssue issue() const { return issue_; }

 private:
  BvhIssue issue_;
};

// Tolerates tabs, spaces and CRLF line endings.
BvhDocument ParseBvh(std::string_view text);
BvhDocument LoadBvh(const std::string& path);

// Numbers are written with 6 significant digits, so a second round trip is
// byte-identical to the first.
std::string SerializeBvh(const BvhDocument& doc);

// Depth-first, declaration-order lookup.
const BvhJoint* FindJoint(const BvhDocument& doc, std::string_view name);

// Motion column of (joint, channel). Throws kMapping if either is unknown.
std::size_t ChannelColumn(const BvhDocument& doc, std::string_view joint,
                          BvhChannel channel);

// frame_count-length series of a rotation channel, in degrees. Position
// channels are rejected with kMapping.
std::vector<double> ExtractChannel(const BvhDocument& doc,
                                   std::string_view joint, BvhChannel channel);

}  // namespace gb

#endif  // GESTUREBRIDGE_BVH_HPP_
