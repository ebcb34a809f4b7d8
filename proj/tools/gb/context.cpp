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

#include "context.hpp"

#include <glog/logging.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "gesturebridge/file_io.hpp"
#include "json.hpp"

namespace gb::cli {

namespace fs = std::filesystem;

std::string DataDir() {
  if (const char* v = std::getenv("GB_DATA_DIR"); v != nullptr && *v != '\0') return v;
  return GB_DEFAULT_DATA_DIR;
}

Context::Context(const GlobalOptions& opts) : opts_(opts) {
  if (!opts.config_path.empty()) config_ = LoadPipelineConfig(opts.config_path);
  ApplyBackendEnvOverrides(config_.backend);
  if (!opts.endpoint.empty()) config_.backend.endpoint_url = opts.endpoint;
  if (!opts.model.empty()) config_.backend.model_name = opts.model;
  if (opts.allow_remote) config_.backend.allow_remote = true;
  if (!opts.out_dir.empty()) config_.output_dir = opts.out_dir;
  if (!opts.template_path.empty()) config_.template_path = opts.template_path;
  if (!opts.profile_path.empty()) config_.profile_path = opts.profile_path;
  if (!opts.mapping_path.empty()) config_.mapping_path = opts.mapping_path;
  if (opts.concurrency > 0) config_.concurrency = opts.concurrency;
  if (config_.template_path.empty()) config_.template_path = DataDir() + "/gsd_template.yaml";
  if (config_.profile_path.empty()) config_.profile_path = DataDir() + "/pepper_profile.yaml";
  if (config_.mapping_path.empty()) config_.mapping_path = DataDir() + "/bvh_mapping.yaml";
  if (opts.mock_mode != "strict" && opts.mock_mode != "lenient") {
    throw Error(ErrorCode::kUsage, "--mock-mode must be strict or lenient");
  }
  config_.Validate();
}

std::unique_ptr<Backend> Context::MakeBackend(const std::string& model,
                                              const std::string& fixture_path) const {
  const MissingFixture policy =
      opts_.mock_mode == "lenient" ? MissingFixture::kFallback : MissingFixture::kError;
  if (!fixture_path.empty()) {
    return std::make_unique<MockBackend>(model, LoadFixtureFile(fixture_path), policy);
  }
  BackendConfig c = config_.backend;
  c.model_name = model;
  return std::make_unique<HttpBackend>(c);
}

const Backend& Context::backend() {
  if (!base_) {
    base_ = MakeBackend(config_.backend.model_name, opts_.mock_path);
    if (!opts_.record_path.empty()) recorder_ = std::make_unique<RecordingBackend>(*base_);
  }
  return recorder_ ? static_cast<const Backend&>(*recorder_) : *base_;
}

PromptTemplate Context::LoadTemplate() const { return LoadPromptTemplate(config_.template_path); }
RobotProfile Context::LoadProfile() const { return LoadRobotProfile(config_.profile_path); }
JointMapping Context::LoadMapping() const { return LoadJointMapping(config_.mapping_path); }

std::string Context::OutputPath(const std::string& explicit_path, const std::string& name) const {
  if (!explicit_path.empty()) return explicit_path;
  return (fs::path(config_.output_dir) / name).string();
}

void Context::Write(const std::string& path, const std::string& content) const {
  if (path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  WriteFileAtomic(path, content);
  LOG(INFO) << "wrote " << path;
}

void Context::Finish() {
  if (recorder_) {
    SaveFixtureFile(opts_.record_path, recorder_->recorded());
    LOG(INFO) << "recorded " << recorder_->recorded().size() << " responses to "
              << opts_.record_path;
  }
}

std::string ErrorJson(std::string_view kind, const std::string& message, int exit_code,
                      const std::string& extra_json) {
  nlohmann::ordered_json err;
  err["kind"] = kind;
  err["message"] = message;
  err["exit_code"] = exit_code;
  if (!extra_json.empty()) {
    const auto extra = nlohmann::ordered_json::parse(extra_json);
    for (const auto& [k, v] : extra.items()) err[k] = v;
  }
  nlohmann::ordered_json j;
  j["error"] = std::move(err);
  return j.dump();
}

}  // namespace gb::cli
