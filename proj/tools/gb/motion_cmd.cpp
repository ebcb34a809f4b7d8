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

// gb retarget bvh | pose, gb traj check | export | preview, gb route

#include <glog/logging.h>

#include <filesystem>
#include <iostream>

#include "context.hpp"
#include "gesturebridge/bvh.hpp"
#include "gesturebridge/file_io.hpp"
#include "gesturebridge/pose.hpp"
#include "json.hpp"

namespace gb::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct BvhArgs {
  std::string in;
  std::string map;
  int factor = 0;
  std::string out;
};

struct PoseArgs {
  std::string in;
  double speed_scale = 0.0;
  int factor = 0;
  std::string out;
};

struct TrajArgs {
  std::string in;
  std::string out;
};

struct RouteArgs {
  std::string sentence;
  std::string landmarks;
  std::string bvh;
  std::string map;
  std::string out;
};

// Command JSON or CSV, chosen by extension.
JointTrajectory LoadTrajectory(const std::string& path, const RobotProfile& profile) {
  const std::string text = ReadFile(path);
  if (std::filesystem::path(path).extension() == ".csv") return TrajectoryFromCsv(text, profile);
  return ImportCommands(CommandDocumentFromJson(text), profile);
}

void RunRetargetBvh(const GlobalOptions& g, const BvhArgs& a) {
  GlobalOptions opts = g;
  if (!a.map.empty()) opts.mapping_path = a.map;
  Context ctx(opts);
  const RobotProfile profile = ctx.LoadProfile();
  const JointMapping mapping = ctx.LoadMapping();
  const BvhDocument doc = LoadBvh(a.in);
  ValidateMapping(mapping, doc, profile);
  const int factor = a.factor > 0 ? a.factor : ctx.config().downsample_factor;
  ConditionReport report;
  const JointTrajectory traj = RetargetBvh(doc, mapping, profile, factor, &report);
  if (report.clamped_values > 0) {
    LOG(WARNING) << report.clamped_values << " angle values clamped to profile limits";
  }
  ctx.Write(ctx.OutputPath(a.out, "commands.json"),
            CommandDocumentToJson(ExportCommands(traj, profile)));
  std::cout << ojson{{"source_frames", report.source_frames},
                     {"keyframes", traj.size()},
                     {"duration_s", traj.duration()},
                     {"clamped_values", report.clamped_values}}
                   .dump()
            << "\n";
}

void RunRetargetPose(const GlobalOptions& g, const PoseArgs& a) {
  Context ctx(g);
  const RobotProfile profile = ctx.LoadProfile();
  PoseRetargetOptions opts;
  opts.speed_scale = a.speed_scale > 0.0 ? a.speed_scale : ctx.config().speed_scale;
  opts.downsample_factor = a.factor > 0 ? a.factor : ctx.config().pose_downsample_factor;
  PoseRetargetReport report;
  const JointTrajectory traj = RetargetPose(LoadPoseSequence(a.in), profile, opts, &report);
  if (report.clamped_values > 0) {
    LOG(WARNING) << report.clamped_values << " angle values clamped to profile limits";
  }
  ctx.Write(ctx.OutputPath(a.out, "commands.json"),
            CommandDocumentToJson(ExportCommands(traj, profile)));
  std::cout << ojson{{"keyframes", traj.size()},
                     {"duration_s", traj.duration()},
                     {"held_frames", report.held_frames},
                     {"clamped_values", report.clamped_values}}
                   .dump()
            << "\n";
}

void RunCheck(const GlobalOptions& g, const TrajArgs& a) {
  Context ctx(g);
  const RobotProfile profile = ctx.LoadProfile();
  auto violations = CheckVelocity(LoadTrajectory(a.in, profile), profile);
  if (!violations.empty()) throw SafetyError(std::move(violations));
  std::cout << ojson{{"violations", ojson::array()}}.dump() << "\n";
}

void RunExport(const GlobalOptions& g, const TrajArgs& a) {
  Context ctx(g);
  const RobotProfile profile = ctx.LoadProfile();
  const CommandDocument doc = ExportCommands(LoadTrajectory(a.in, profile), profile);
  ctx.Write(ctx.OutputPath(a.out, "commands.json"), CommandDocumentToJson(doc));
}

void RunPreview(const GlobalOptions& g, const TrajArgs& a) {
  Context ctx(g);
  const RobotProfile profile = ctx.LoadProfile();
  const JointTrajectory traj = LoadTrajectory(a.in, profile);
  ctx.Write(ctx.OutputPath(a.out, "preview.svg"),
            TrajectorySvg(traj, profile, std::filesystem::path(a.in).filename().string()));
}

void RunRoute(const GlobalOptions& g, const RouteArgs& a) {
  GlobalOptions opts = g;
  if (!a.map.empty()) opts.mapping_path = a.map;
  Context ctx(opts);
  const PromptTemplate tmpl = ctx.LoadTemplate();
  const RobotProfile profile = ctx.LoadProfile();
  const JointMapping mapping = ctx.LoadMapping();
  std::optional<PoseSequence> landmarks;
  std::optional<BvhDocument> bvh;
  if (!a.landmarks.empty()) landmarks = LoadPoseSequence(a.landmarks);
  if (!a.bvh.empty()) bvh = LoadBvh(a.bvh);
  RouteInputs in;
  in.sentence = a.sentence;
  in.landmarks = landmarks ? &*landmarks : nullptr;
  in.bvh = bvh ? &*bvh : nullptr;
  const RouteResult r = Route(in, ctx.backend(), tmpl, profile, mapping, ctx.config());
  ctx.Write(ctx.OutputPath(a.out, "commands.json"),
            CommandDocumentToJson(ExportCommands(r.trajectory, profile)));
  ctx.Finish();
  ojson summary;
  summary["label"] = LabelName(r.classification.label);
  summary["reasoning"] = r.classification.reasoning;
  summary["provenance"] = r.provenance;
  summary["keyframes"] = r.trajectory.size();
  summary["duration_s"] = r.trajectory.duration();
  std::cout << summary.dump() << "\n";
}

}  // namespace

void AddMotionCommands(CLI::App& app, GlobalOptions& g) {
  CLI::App* rt = app.add_subcommand("retarget", "Motion to robot joint space");
  rt->require_subcommand(1);

  auto ba = std::make_shared<BvhArgs>();
  CLI::App* b = rt->add_subcommand("bvh", "Retarget a BVH file");
  b->add_option("--in", ba->in, "BVH file")->required();
  b->add_option("--map", ba->map, "Joint mapping YAML (default: bundled identity mapping)");
  b->add_option("--factor", ba->factor, "Keyframe downsampling factor (default 12)")
      ->check(CLI::PositiveNumber);
  b->add_option("--out", ba->out, "Command JSON (default <out-dir>/commands.json)");
  b->callback([&g, ba] { RunRetargetBvh(g, *ba); });

  auto pa = std::make_shared<PoseArgs>();
  CLI::App* p = rt->add_subcommand("pose", "Retarget a pose landmark sequence");
  p->add_option("--in", pa->in, "Landmark JSONL")->required();
  p->add_option("--speed-scale", pa->speed_scale, "Time dilation factor (default 12)")
      ->check(CLI::PositiveNumber);
  p->add_option("--factor", pa->factor, "Keyframe downsampling factor (default 1)")
      ->check(CLI::PositiveNumber);
  p->add_option("--out", pa->out, "Command JSON (default <out-dir>/commands.json)");
  p->callback([&g, pa] { RunRetargetPose(g, *pa); });

  CLI::App* tr = app.add_subcommand("traj", "Trajectory safety tools");
  tr->require_subcommand(1);
  auto ca = std::make_shared<TrajArgs>();
  CLI::App* c = tr->add_subcommand("check", "Report velocity violations (exit 4 if any)");
  c->add_option("--in", ca->in, "Command JSON or trajectory CSV")->required();
  c->callback([&g, ca] { RunCheck(g, *ca); });

  auto ea = std::make_shared<TrajArgs>();
  CLI::App* e = tr->add_subcommand("export", "Write a command document; refuses unsafe input");
  e->add_option("--in", ea->in, "Trajectory CSV or command JSON")->required();
  e->add_option("--out", ea->out, "Command JSON (default <out-dir>/commands.json)");
  e->callback([&g, ea] { RunExport(g, *ea); });

  auto va = std::make_shared<TrajArgs>();
  CLI::App* v = tr->add_subcommand("preview", "Plot joint angles against time as SVG");
  v->add_option("--in", va->in, "Command JSON or trajectory CSV")->required();
  v->add_option("--out", va->out, "SVG path (default <out-dir>/preview.svg)");
  v->callback([&g, va] { RunPreview(g, *va); });

  auto ra = std::make_shared<RouteArgs>();
  CLI::App* r = app.add_subcommand("route", "Classify a sentence and produce its motion");
  r->add_option("--sentence", ra->sentence, "Utterance text")->required();
  r->add_option("--landmarks", ra->landmarks, "Landmark JSONL for the mimic path");
  r->add_option("--bvh", ra->bvh, "BVH file for the generated-motion path");
  r->add_option("--map", ra->map, "Joint mapping YAML");
  r->add_option("--out", ra->out, "Command JSON (default <out-dir>/commands.json)");
  r->callback([&g, ra] { RunRoute(g, *ra); });
}

}  // namespace gb::cli
