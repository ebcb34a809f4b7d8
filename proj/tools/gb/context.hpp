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

#ifndef GESTUREBRIDGE_TOOLS_CONTEXT_HPP_
#define GESTUREBRIDGE_TOOLS_CONTEXT_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gesturebridge/bvh_retarget.hpp"
#include "gesturebridge/gsd.hpp"
#include "gesturebridge/llm.hpp"
#include "gesturebridge/pipeline.hpp"
#include "gesturebridge/robot_profile.hpp"

namespace gb::cli {

// Options shared by every subcommand.
struct GlobalOptions {
  std::string config_path;
  std::string endpoint;
  std::string model;
  std::string out_dir;
  std::string template_path;
  std::string profile_path;
  std::string mapping_path;
  std::string mock_path;
  std::string mock_mode = "strict";
  std::string record_path;
  int concurrency = 0;
  bool allow_remote = false;
  bool verbose = false;
};

class Context {
 public:
  explicit Context(const GlobalOptions& opts);

  const PipelineConfig& config() const { return config_; }
  PipelineConfig& mutable_config() { return config_; }

  // The backend selected by --mock / the config. With --record, responses
  // are captured and written out by Finish().
  const Backend& backend();
  // A backend for one named annotator: a fixture file replays, otherwise
  // the configured endpoint is queried with `model`.
  std::unique_ptr<Backend> MakeBackend(const std::string& model,
                                       const std::string& fixture_path) const;

  PromptTemplate LoadTemplate() const;
  RobotProfile LoadProfile() const;
  JointMapping LoadMapping() const;

  // `name` under the output directory unless `explicit_path` is set.
  // A path of "-" means standard output.
  std::string OutputPath(const std::string& explicit_path, const std::string& name) const;
  void Write(const std::string& path, const std::string& content) const;

  void Finish();

 private:
  GlobalOptions opts_;
  PipelineConfig config_;
  std::unique_ptr<Backend> base_;
  std::unique_ptr<RecordingBackend> recorder_;
};

std::string DataDir();

// Machine-readable failure report for stderr.
std::string ErrorJson(std::string_view kind, const std::string& message, int exit_code,
                      const std::string& extra_json = "");

void AddGsdCommands(CLI::App& app, GlobalOptions& opts);
void AddCorpusCommands(CLI::App& app, GlobalOptions& opts);
void AddMotionCommands(CLI::App& app, GlobalOptions& opts);

}  // namespace gb::cli

#endif  // GESTUREBRIDGE_TOOLS_CONTEXT_HPP_
