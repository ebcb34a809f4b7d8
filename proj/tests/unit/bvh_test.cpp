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

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "gesturebridge/bvh.hpp"
#include "gesturebridge/bvh_retarget.hpp"
#include "test_support.hpp"

namespace gb {
namespace {

using test::FixturePath;

BvhIssue IssueOf(const std::string& text) {
  try {
    ParseBvh(text);
  } catch (const BvhParseError& e) {
    return e.issue();
  }
  ADD_FAILURE() << "no parse error";
  return BvhIssue::kSyntax;
}

const char* kTiny =
    "HIERARCHY\nROOT Hips\n{\n OFFSET 0 0 0\n CHANNELS 3 Zrotation Xrotation Yrotation\n"
    " End Site\n {\n  OFFSET 0 1 0\n }\n}\n";

JointMapping LoadDefaultMapping() { return LoadJointMapping(test::DataPath("bvh_mapping.yaml")); }

TEST(BvhParseTest, MinimalFile) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/minimal.bvh"));
  EXPECT_EQ(doc.frame_count, 2u);
  EXPECT_EQ(doc.channel_count, 9u);
  EXPECT_EQ(doc.motion.size(), 18u);
  EXPECT_DOUBLE_EQ(doc.frame_time, 0.0333333);
  EXPECT_EQ(doc.root.name, "Hips");
  ASSERT_EQ(doc.root.children.size(), 1u);
  EXPECT_EQ(doc.root.children[0].name, "Chest");
  EXPECT_DOUBLE_EQ(doc.root.children[0].offset[1], 5.21);
  ASSERT_TRUE(doc.root.children[0].end_site.has_value());
  EXPECT_DOUBLE_EQ(doc.value(1, 8), 12.5);
  EXPECT_DOUBLE_EQ(doc.value(0, 7), -2.25);
}

TEST(BvhParseTest, FrameRate) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/gesture_600.bvh"));
  EXPECT_EQ(doc.frame_count, 600u);
  EXPECT_EQ(doc.channel_count, 39u);
  EXPECT_NEAR(doc.frame_rate(), 60.0, 1e-3);
}

TEST(BvhParseTest, CrlfAndSpaces) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/crlf_spaces.bvh"));
  EXPECT_EQ(doc.frame_count, 4u);
  EXPECT_EQ(doc.channel_count, 39u);
  EXPECT_NEAR(doc.value(3, 38), 41.0 / 7.0, 1e-4);
}

TEST(BvhParseTest, FrameCountMismatchReportsLine) {
  try {
    LoadBvh(FixturePath("bvh/bad_frame_count.bvh"));
    FAIL();
  } catch (const BvhParseError& e) {
    EXPECT_EQ(e.issue(), BvhIssue::kFrameCount);
    EXPECT_GT(e.line(), 0);
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_EQ(e.exit_code(), 2);
  }
}

TEST(BvhParseTest, StructuralErrors) {
  EXPECT_EQ(IssueOf("MOTION\nFrames: 0\nFrame Time: 0.1\n"), BvhIssue::kMissingHierarchy);
  EXPECT_EQ(IssueOf(kTiny), BvhIssue::kMissingMotion);
  const std::string head = std::string(kTiny) + "MOTION\nFrames: 1\nFrame Time: 0.1\n";
  EXPECT_EQ(IssueOf(head + "1 2\n"), BvhIssue::kRowLength);
  EXPECT_EQ(IssueOf(head + "1 x 3\n"), BvhIssue::kNonNumeric);
  EXPECT_EQ(IssueOf(head + "1 2 3\n4 5 6\n"), BvhIssue::kFrameCount);
  const std::string motion = "MOTION\nFrames: 0\nFrame Time: 0.1\n";
  EXPECT_EQ(IssueOf("HIERARCHY\nROOT Hips\n{\n CHANNELS 2 Zrotation\n}\n" + motion), BvhIssue::kSyntax);
  EXPECT_EQ(IssueOf("HIERARCHY\nROOT Hips\n{\n OFFSET 0 0 0\n CHANNELS 1 Wobble\n}\n" + motion),
            BvhIssue::kSyntax);
}

TEST(BvhParseTest, NonNumericLineNumber) {
  const std::string text = std::string(kTiny) + "MOTION\nFrames: 2\nFrame Time: 0.1\n1 2 3\n4 ? 6\n";
  try {
    ParseBvh(text);
    FAIL();
  } catch (const BvhParseError& e) {
    EXPECT_EQ(e.issue(), BvhIssue::kNonNumeric);
    EXPECT_EQ(e.line(), 15);
  }
}

TEST(BvhParseTest, RoundTripIsStable) {
  for (const char* name : {"minimal", "constant90", "upper_body", "gesture_600", "crlf_spaces"}) {
    const BvhDocument doc = LoadBvh(FixturePath(std::string("bvh/") + name + ".bvh"));
    const std::string once = SerializeBvh(doc);
    const BvhDocument again = ParseBvh(once);
    EXPECT_EQ(SerializeBvh(again), once) << name;
    EXPECT_EQ(again.frame_count, doc.frame_count);
    EXPECT_EQ(again.channel_count, doc.channel_count);
    for (std::size_t i = 0; i < doc.motion.size(); ++i) {
      ASSERT_NEAR(again.motion[i], doc.motion[i], 1e-4 * (1.0 + std::fabs(doc.motion[i]))) << name;
    }
  }
}

TEST(BvhChannelTest, ExtractAndColumns) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/constant90.bvh"));
  EXPECT_EQ(ChannelColumn(doc, "Head", BvhChannel::kZrotation), 6u);
  EXPECT_EQ(ChannelColumn(doc, "Hips", BvhChannel::kXposition), 0u);
  const auto series = ExtractChannel(doc, "Head", BvhChannel::kZrotation);
  ASSERT_EQ(series.size(), 5u);
  for (double v : series) EXPECT_EQ(v, 90.0);
  try {
    ExtractChannel(doc, "Hips", BvhChannel::kXposition);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMapping);
  }
  EXPECT_THROW(ChannelColumn(doc, "Tail", BvhChannel::kZrotation), Error);
  EXPECT_THROW(ChannelColumn(doc, "Chest", BvhChannel::kZrotation), Error);
  EXPECT_EQ(FindJoint(doc, "Head")->name, "Head");
  EXPECT_EQ(FindJoint(doc, "Tail"), nullptr);
}

TEST(BvhChannelTest, NameRoundTrip) {
  for (auto c : {BvhChannel::kXposition, BvhChannel::kYposition, BvhChannel::kZposition,
                 BvhChannel::kXrotation, BvhChannel::kYrotation, BvhChannel::kZrotation}) {
    EXPECT_EQ(ParseChannelName(ChannelName(c)), c);
  }
  EXPECT_FALSE(ParseChannelName("Wrotation").has_value());
}

TEST(BvhRetargetTest, ConstantNinetyDegreesIsHalfPi) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/constant90.bvh"));
  JointMapping m;
  m.entries.push_back({"HeadYaw", "Head", BvhChannel::kZrotation, 1.0, 0.0});
  m.neutral["LShoulderPitch"] = 1.5;
  const RobotProfile p = test::DefaultProfile();
  ValidateMapping(m, doc, p);
  const JointTrajectory t = BvhToJointSpace(doc, m, p);
  ASSERT_EQ(t.size(), 5u);
  for (const JointFrame& f : t.frames) {
    EXPECT_NEAR(f.angles[0], std::numbers::pi / 2, 1e-12);
    EXPECT_EQ(f.angles[2], 1.5);
    EXPECT_EQ(f.angles[1], 0.0);
  }
  EXPECT_NEAR(t.frames[4].timestamp, 4 * 0.0166667, 1e-12);
}

TEST(BvhRetargetTest, AllZeroMotionGivesZeroTrajectory) {
  BvhDocument doc = LoadBvh(FixturePath("bvh/upper_body.bvh"));
  std::fill(doc.motion.begin(), doc.motion.end(), 0.0);
  const JointMapping m = LoadJointMapping(test::DataPath("bvh_mapping.yaml"));
  const RobotProfile p = test::UnlimitedProfile();
  const JointTrajectory t = BvhToJointSpace(doc, m, p);
  for (const JointFrame& f : t.frames) {
    for (double a : f.angles) EXPECT_EQ(a, 0.0);
  }
  EXPECT_EQ(PeakVelocity(t), 0.0);
}

TEST(BvhRetargetTest, MappingValidation) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/constant90.bvh"));
  const RobotProfile p = test::DefaultProfile();
  auto expect_mapping_error = [&](const JointMapping& m) {
    try {
      ValidateMapping(m, doc, p);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMapping);
    }
  };
  expect_mapping_error({{{"Tail", "Head", BvhChannel::kZrotation, 1, 0}}, {}});
  expect_mapping_error({{{"HeadYaw", "Neck", BvhChannel::kZrotation, 1, 0}}, {}});
  expect_mapping_error({{{"HeadYaw", "Hips", BvhChannel::kXposition, 1, 0}}, {}});
  expect_mapping_error({{{"HeadYaw", "Head", BvhChannel::kZrotation, 1, 0},
                         {"HeadYaw", "Head", BvhChannel::kXrotation, 1, 0}},
                        {}});
  EXPECT_THROW(ParseJointMapping("mappings:\n  - {robot: HeadYaw, bvh: Head, channel: Q}\n"),
               Error);
}

TEST(BvhRetargetTest, ScaleAndOffset) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/constant90.bvh"));
  const JointMapping m =
      ParseJointMapping("mappings:\n  - {robot: HeadYaw, bvh: Head, channel: Zrotation, "
                        "scale: 0.5, offset: 0.25}\n");
  const JointTrajectory t = BvhToJointSpace(doc, m, test::DefaultProfile());
  EXPECT_NEAR(t.frames[0].angles[0], 0.5 * std::numbers::pi / 2 + 0.25, 1e-12);
}

TEST(BvhRetargetTest, SixHundredFramesGiveFiftyOneKeyframes) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/gesture_600.bvh"));
  const RobotProfile p = test::DefaultProfile();
  const JointMapping m = LoadDefaultMapping();
  ValidateMapping(m, doc, p);
  const JointTrajectory raw = BvhToJointSpace(doc, m, p);
  const JointTrajectory out = RetargetBvh(doc, m, p, 12);
  EXPECT_EQ(out.size(), 51u);
  EXPECT_EQ(out.duration(), raw.duration());
  EXPECT_EQ(out.duration(), 599 * doc.frame_time);
  for (const JointFrame& f : out.frames) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      EXPECT_GE(f.angles[j], p.joint(j).min_angle);
      EXPECT_LE(f.angles[j], p.joint(j).max_angle);
    }
  }
  EXPECT_TRUE(CheckVelocity(out, p).empty());
  EXPECT_LE(PeakVelocity(out), PeakVelocity(raw));
}

TEST(BvhRetargetTest, FactorOneWithoutLimitsIsUnitConversion) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/upper_body.bvh"));
  const RobotProfile p = test::UnlimitedProfile();
  const JointMapping m = LoadDefaultMapping();
  const JointTrajectory t = RetargetBvh(doc, m, p, 1);
  ASSERT_EQ(t.size(), doc.frame_count);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (const MappingEntry& e : m.entries) {
      const std::size_t j = *p.IndexOf(e.robot_joint);
      const double deg = doc.value(i, ChannelColumn(doc, e.bvh_joint, e.channel));
      EXPECT_NEAR(t.frames[i].angles[j], deg * std::numbers::pi / 180.0, 1e-12);
    }
  }
}

TEST(BvhRetargetTest, RetargetIsLinearInTheSource) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/upper_body.bvh"));
  BvhDocument doubled = doc;
  for (double& v : doubled.motion) v *= 2.0;
  const RobotProfile p = test::UnlimitedProfile();
  const JointMapping m = LoadDefaultMapping();
  const JointTrajectory a = BvhToJointSpace(doc, m, p);
  const JointTrajectory b = BvhToJointSpace(doubled, m, p);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      EXPECT_NEAR(b.frames[i].angles[j], 2.0 * a.frames[i].angles[j], 1e-12);
    }
  }
}

TEST(BvhRetargetTest, OutOfLimitsIsClamped) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/out_of_limits.bvh"));
  const RobotProfile p = test::DefaultProfile();
  ConditionReport report;
  const JointTrajectory t = RetargetBvh(doc, LoadDefaultMapping(), p, 1, &report);
  EXPECT_GE(report.clamped_values, 3u * doc.frame_count);
  for (const JointFrame& f : t.frames) {
    EXPECT_EQ(f.angles[0], p.joint(0).max_angle);
    EXPECT_EQ(f.angles[3], p.joint(3).max_angle);
    EXPECT_EQ(f.angles[10], p.joint(10).min_angle);
  }
}

TEST(BvhRetargetTest, TooFastFailsEvenAfterDownsampling) {
  const BvhDocument doc = LoadBvh(FixturePath("bvh/too_fast.bvh"));
  EXPECT_THROW(RetargetBvh(doc, LoadDefaultMapping(), test::DefaultProfile(), 12), SafetyError);
}

}  // namespace
}  // namespace gb
