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

#include "gesturebridge/bvh.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "gesturebridge/file_io.hpp"

namespace gb {

namespace {

constexpr std::array<std::string_view, 6> kChannelNames = {
    "Xposition", "Yposition", "Zposition", "Xrotation", "Yrotation", "Zrotation"};

struct Token {
  std::string_view text;
  int line = 0;
};

std::vector<std::string_view> SplitWs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool ParseDouble(std::string_view s, double* out) {
  if (s.empty()) return false;
  const std::string buf(s);
  char* end = nullptr;
  *out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(*out);
}

// Recursive descent over the HIERARCHY token stream.
class HierarchyParser {
 public:
  HierarchyParser(const std::vector<Token>& tokens, int eof_line)
      : tokens_(tokens), eof_line_(eof_line) {}

  BvhJoint ParseRoot(std::size_t* channel_count) {
    const Token& kw = Next("ROOT");
    if (kw.text != "ROOT") Fail("expected ROOT, found '" + std::string(kw.text) + "'", kw.line);
    BvhJoint root = ParseJointBody(kw.line);
    *channel_count = channels_;
    if (pos_ < tokens_.size()) {
      Fail("unexpected token '" + std::string(tokens_[pos_].text) +
               "' after root joint (only one ROOT supported)",
           tokens_[pos_].line);
    }
    return root;
  }

 private:
  [[noreturn]] void Fail(const std::string& msg, int line) const {
    throw BvhParseError(BvhIssue::kSyntax, "HIERARCHY: " + msg, line);
  }

  const Token& Next(const char* what) {
    if (pos_ >= tokens_.size()) {
      Fail(std::string("unexpected end of hierarchy, expected ") + what, eof_line_);
    }
    return tokens_[pos_++];
  }

  double NextNumber(const char* what) {
    const Token& t = Next(what);
    double v = 0.0;
    if (!ParseDouble(t.text, &v)) {
      Fail(std::string("expected number for ") + what + ", found '" +
               std::string(t.text) + "'",
           t.line);
    }
    return v;
  }

  Vec3 ParseOffset() {
    return {NextNumber("OFFSET"), NextNumber("OFFSET"), NextNumber("OFFSET")};
  }

  // Joint names run to the end of the keyword's line.
  std::string ParseName(int line) {
    std::string name;
    while (pos_ < tokens_.size() && tokens_[pos_].line == line &&
           tokens_[pos_].text != "{") {
      if (!name.empty()) name += ' ';
      name += tokens_[pos_++].text;
    }
    if (name.empty()) Fail("joint without a name", line);
    return name;
  }

  void Expect(std::string_view text) {
    const Token& t = Next(std::string(text).c_str());
    if (t.text != text) {
      Fail("expected '" + std::string(text) + "', found '" + std::string(t.text) + "'",
           t.line);
    }
  }

  BvhJoint ParseJointBody(int keyword_line) {
    BvhJoint joint;
    joint.name = ParseName(keyword_line);
    Expect("{");
    for (;;) {
      const Token& t = Next("'}'");
      if (t.text == "}") break;
      if (t.text == "OFFSET") {
        joint.offset = ParseOffset();
      } else if (t.text == "CHANNELS") {
        const double n = NextNumber("CHANNELS count");
        if (n < 0 || n != std::floor(n)) Fail("invalid channel count", t.line);
        for (int i = 0; i < static_cast<int>(n); ++i) {
          const Token& c = Next("channel name");
          const auto ch = ParseChannelName(c.text);
          if (!ch) Fail("unknown channel '" + std::string(c.text) + "'", c.line);
          joint.channels.push_back(*ch);
        }
        channels_ += joint.channels.size();
      } else if (t.text == "JOINT") {
        joint.children.push_back(ParseJointBody(t.line));
      } else if (t.text == "End") {
        const Token& site = Next("Site");
        if (site.text != "Site") Fail("expected 'Site' after 'End'", site.line);
        Expect("{");
        Expect("OFFSET");
        joint.end_site = ParseOffset();
        Expect("}");
      } else {
        Fail("unexpected token '" + std::string(t.text) + "'", t.line);
      }
    }
    return joint;
  }

  const std::vector<Token>& tokens_;
  int eof_line_;
  std::size_t pos_ = 0;
  std::size_t channels_ = 0;
};

// Value of a "Key: value" header line such as "Frame Time: 0.0166667".
std::string_view HeaderValue(std::string_view line, std::string_view key, int line_no) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) {
    throw BvhParseError(BvhIssue::kSyntax,
                        "MOTION: expected '" + std::string(key) + ": <value>'", line_no);
  }
  const auto words = SplitWs(line.substr(0, colon));
  std::string joined;
  for (std::string_view w : words) {
    if (!joined.empty()) joined += ' ';
    joined += w;
  }
  const auto value = SplitWs(line.substr(colon + 1));
  if (joined != key || value.size() != 1) {
    throw BvhParseError(BvhIssue::kSyntax,
                        "MOTION: expected '" + std::string(key) + ": <value>'", line_no);
  }
  return value.front();
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

void WriteJoint(const BvhJoint& joint, int depth, bool is_root, std::string& out) {
  const std::string ind(static_cast<std::size_t>(depth), '\t');
  out += ind + (is_root ? "ROOT " : "JOINT ") + joint.name + "\n";
  out += ind + "{\n";
  out += ind + "\tOFFSET " + Fmt(joint.offset[0]) + " " + Fmt(joint.offset[1]) + " " +
         Fmt(joint.offset[2]) + "\n";
  out += ind + "\tCHANNELS " + std::to_string(joint.channels.size());
  for (BvhChannel c : joint.channels) out += " " + std::string(ChannelName(c));
  out += "\n";
  for (const BvhJoint& child : joint.children) WriteJoint(child, depth + 1, false, out);
  if (joint.end_site) {
    out += ind + "\tEnd Site\n" + ind + "\t{\n";
    out += ind + "\t\tOFFSET " + Fmt((*joint.end_site)[0]) + " " +
           Fmt((*joint.end_site)[1]) + " " + Fmt((*joint.end_site)[2]) + "\n";
    out += ind + "\t}\n";
  }
  out += ind + "}\n";
}

}  // namespace

std::string_view ChannelName(BvhChannel c) {
  return kChannelNames[static_cast<std::size_t>(c)];
}

std::optional<BvhChannel> ParseChannelName(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
    if (kChannelNames[i] == name) return static_cast<BvhChannel>(i);
  }
  return std::nullopt;
}

bool IsRotation(BvhChannel c) {
  return c == BvhChannel::kXrotation || c == BvhChannel::kYrotation ||
         c == BvhChannel::kZrotation;
}

BvhDocument ParseBvh(std::string_view text) {
  const auto lines = SplitLines(text);

  // Locate HIERARCHY and MOTION keywords.
  std::size_t ln = 0;
  while (ln < lines.size() && SplitWs(lines[ln]).empty()) ++ln;
  if (ln == lines.size() || SplitWs(lines[ln]).front() != "HIERARCHY") {
    throw BvhParseError(BvhIssue::kMissingHierarchy,
                        "missing HIERARCHY section", ln < lines.size() ? static_cast<int>(ln) + 1 : 0);
  }
  std::vector<Token> tokens;
  {
    const auto first = SplitWs(lines[ln]);
    for (std::size_t k = 1; k < first.size(); ++k) tokens.push_back({first[k], static_cast<int>(ln) + 1});
  }
  std::size_t motion_line = lines.size();
  for (std::size_t i = ln + 1; i < lines.size(); ++i) {
    const auto words = SplitWs(lines[i]);
    if (!words.empty() && words.front() == "MOTION") {
      motion_line = i;
      break;
    }
    for (std::string_view w : words) tokens.push_back({w, static_cast<int>(i) + 1});
  }
  if (motion_line == lines.size()) {
    throw BvhParseError(BvhIssue::kMissingMotion, "missing MOTION section",
                        static_cast<int>(lines.size()));
  }

  BvhDocument doc;
  HierarchyParser hp(tokens, static_cast<int>(motion_line) + 1);
  doc.root = hp.ParseRoot(&doc.channel_count);

  // MOTION header.
  std::size_t i = motion_line + 1;
  auto next_nonempty = [&]() -> std::size_t {
    while (i < lines.size() && SplitWs(lines[i]).empty()) ++i;
    return i;
  };
  if (next_nonempty() == lines.size()) {
    throw BvhParseError(BvhIssue::kSyntax, "MOTION: missing 'Frames:' line",
                        static_cast<int>(motion_line) + 1);
  }
  const int frames_line = static_cast<int>(i) + 1;
  {
    double n = 0;
    if (!ParseDouble(HeaderValue(lines[i], "Frames", frames_line), &n) || n < 0 ||
        n != std::floor(n)) {
      throw BvhParseError(BvhIssue::kSyntax, "MOTION: invalid frame count", frames_line);
    }
    doc.frame_count = static_cast<std::size_t>(n);
  }
  ++i;
  if (next_nonempty() == lines.size()) {
    throw BvhParseError(BvhIssue::kSyntax, "MOTION: missing 'Frame Time:' line", frames_line);
  }
  {
    const int line_no = static_cast<int>(i) + 1;
    if (!ParseDouble(HeaderValue(lines[i], "Frame Time", line_no), &doc.frame_time) ||
        !(doc.frame_time > 0.0)) {
      throw BvhParseError(BvhIssue::kSyntax, "MOTION: frame time must be > 0", line_no);
    }
  }
  ++i;

  // Motion rows.
  std::size_t rows = 0;
  doc.motion.reserve(doc.frame_count * doc.channel_count);
  for (; i < lines.size(); ++i) {
    const auto words = SplitWs(lines[i]);
    if (words.empty()) continue;
    const int line_no = static_cast<int>(i) + 1;
    if (rows == doc.frame_count) {
      throw BvhParseError(BvhIssue::kFrameCount,
                          "MOTION: declared " + std::to_string(doc.frame_count) +
                              " frames but found more rows",
                          line_no);
    }
    if (words.size() != doc.channel_count) {
      throw BvhParseError(BvhIssue::kRowLength,
                          "MOTION: row has " + std::to_string(words.size()) +
                              " values, hierarchy declares " +
                              std::to_string(doc.channel_count) + " channels",
                          line_no);
    }
    for (std::string_view w : words) {
      double v = 0.0;
      if (!ParseDouble(w, &v)) {
        throw BvhParseError(BvhIssue::kNonNumeric,
                            "MOTION: non-numeric value '" + std::string(w) + "'", line_no);
      }
      doc.motion.push_back(v);
    }
    ++rows;
  }
  if (rows != doc.frame_count) {
    throw BvhParseError(BvhIssue::kFrameCount,
                        "MOTION: declared " + std::to_string(doc.frame_count) +
                            " frames but found " + std::to_string(rows) + " rows",
                        frames_line);
  }
  return doc;
}

BvhDocument LoadBvh(const std::string& path) { return ParseBvh(ReadFile(path)); }

std::string SerializeBvh(const BvhDocument& doc) {
  std::string out = "HIERARCHY\n";
  WriteJoint(doc.root, 0, true, out);
  out += "MOTION\n";
  out += "Frames: " + std::to_string(doc.frame_count) + "\n";
  out += "Frame Time: " + Fmt(doc.frame_time) + "\n";
  for (std::size_t f = 0; f < doc.frame_count; ++f) {
    for (std::size_t c = 0; c < doc.channel_count; ++c) {
      if (c > 0) out += ' ';
      out += Fmt(doc.value(f, c));
    }
    out += '\n';
  }
  return out;
}

const BvhJoint* FindJoint(const BvhDocument& doc, std::string_view name) {
  std::function<const BvhJoint*(const BvhJoint&)> visit =
      [&](const BvhJoint& j) -> const BvhJoint* {
    if (j.name == name) return &j;
    for (const BvhJoint& c : j.children) {
      if (const BvhJoint* hit = visit(c)) return hit;
    }
    return nullptr;
  };
  return visit(doc.root);
}

std::size_t ChannelColumn(const BvhDocument& doc, std::string_view joint,
                          BvhChannel channel) {
  std::size_t column = 0;
  bool joint_found = false;
  std::optional<std::size_t> hit;
  std::function<void(const BvhJoint&)> visit = [&](const BvhJoint& j) {
    if (hit) return;
    if (j.name == joint) {
      joint_found = true;
      for (std::size_t k = 0; k < j.channels.size(); ++k) {
        if (j.channels[k] == channel) {
          hit = column + k;
          return;
        }
      }
    }
    column += j.channels.size();
    for (const BvhJoint& c : j.children) visit(c);
  };
  visit(doc.root);
  if (hit) return *hit;
  if (!joint_found) {
    throw Error(ErrorCode::kMapping, "BVH joint not found: " + std::string(joint));
  }
  throw Error(ErrorCode::kMapping, "BVH joint " + std::string(joint) +
                                       " does not declare channel " +
                                       std::string(ChannelName(channel)));
}

std::vector<double> ExtractChannel(const BvhDocument& doc,
                                   std::string_view joint, BvhChannel channel) {
  if (!IsRotation(channel)) {
    throw Error(ErrorCode::kMapping, "channel " + std::string(ChannelName(channel)) +
                                         " of " + std::string(joint) +
                                         " is not a rotation channel");
  }
  const std::size_t col = ChannelColumn(doc, joint, channel);
  std::vector<double> series(doc.frame_count);
  for (std::size_t f = 0; f < doc.frame_count; ++f) series[f] = doc.value(f, col);
  return series;
}

}  // namespace gb
