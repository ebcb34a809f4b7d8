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

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "gesturebridge/bvh.hpp"
#include "gesturebridge/bvh_retarget.hpp"
#include "gesturebridge/eval.hpp"
#include "gesturebridge/file_io.hpp"
#include "gesturebridge/gsd.hpp"
#include "gesturebridge/pose.hpp"
#include "gesturebridge/robot_profile.hpp"
#include "gesturebridge/trajectory.hpp"

namespace {

std::string Fixture(const std::string& rel) { return std::string(GB_BENCH_FIXTURE_DIR) + "/" + rel; }
std::string Data(const std::string& rel) { return std::string(GB_BENCH_DATA_DIR) + "/" + rel; }

void BM_ParseBvh(benchmark::State& state) {
  const std::string text = gb::ReadFile(Fixture("bvh/gesture_600.bvh"));
  for (auto _ : state) benchmark::DoNotOptimize(gb::ParseBvh(text));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseBvh);

void BM_RetargetBvh(benchmark::State& state) {
  const gb::BvhDocument doc = gb::LoadBvh(Fixture("bvh/gesture_600.bvh"));
  const gb::JointMapping mapping = gb::LoadJointMapping(Data("bvh_mapping.yaml"));
  const gb::RobotProfile profile = gb::LoadRobotProfile(Data("pepper_profile.yaml"));
  for (auto _ : state) benchmark::DoNotOptimize(gb::RetargetBvh(doc, mapping, profile));
}
BENCHMARK(BM_RetargetBvh);

// Slow sinusoids sampled at 60 Hz; state.range(0) frames.
void BM_Condition(benchmark::State& state) {
  const gb::RobotProfile profile = gb::LoadRobotProfile(Data("pepper_profile.yaml"));
  gb::JointTrajectory t;
  for (int64_t i = 0; i < state.range(0); ++i) {
    gb::JointFrame f;
    f.timestamp = static_cast<double>(i) / 60.0;
    for (std::size_t j = 0; j < gb::kJointCount; ++j) {
      f.angles[j] = 0.3 * std::sin(0.5 * f.timestamp + static_cast<double>(j));
    }
    t.frames.push_back(f);
  }
  for (auto _ : state) benchmark::DoNotOptimize(gb::Condition(t, profile, 12));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Condition)->Range(600, 60000);

void BM_RetargetPose(benchmark::State& state) {
  const gb::PoseSequence seq = gb::LoadPoseSequence(Fixture("pose/static_arms_down.jsonl"));
  const gb::RobotProfile profile = gb::LoadRobotProfile(Data("pepper_profile.yaml"));
  for (auto _ : state) benchmark::DoNotOptimize(gb::RetargetPose(seq, profile));
}
BENCHMARK(BM_RetargetPose);

void BM_ParseResponse(benchmark::State& state) {
  const std::string raw =
      "<think>The speaker asks the patient to lift an arm, which is a physical action."
      "</think>\nSentence: \"Lift your arm.\"\nClassification: INSTRUCTION\n"
      "Reasoning: Directs a limb movement.";
  for (auto _ : state) benchmark::DoNotOptimize(gb::ParseResponse(raw));
}
BENCHMARK(BM_ParseResponse);

void BM_BuildPrompt(benchmark::State& state) {
  const gb::PromptTemplate t = gb::LoadPromptTemplate(Data("gsd_template.yaml"));
  for (auto _ : state) benchmark::DoNotOptimize(gb::BuildPrompt(t, "Could you turn your head to the left?"));
}
BENCHMARK(BM_BuildPrompt);

void BM_ComputeMetrics(benchmark::State& state) {
  const gb::ConfusionMatrix m =
      gb::ConfusionMatrix::FromRows({{{101, 0, 6, 10}, {28, 711, 135, 38}, {26, 86, 2567, 28}}});
  for (auto _ : state) benchmark::DoNotOptimize(gb::ComputeMetrics(m));
}
BENCHMARK(BM_ComputeMetrics);

}  // namespace

BENCHMARK_MAIN();
