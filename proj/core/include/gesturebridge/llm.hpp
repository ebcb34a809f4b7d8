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

#ifndef GESTUREBRIDGE_LLM_HPP_
#define GESTUREBRIDGE_LLM_HPP_

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace gb {

// Decoding parameters sent with every generate request.
struct SamplingOptions {
  double temperature = 0.1;
  double top_p = 0.9;
  int top_k = 10;
  int num_predict = 1000;
  int num_ctx = 10000;
  bool stream = false;

  // Throws kConfig when a value is out of range or stream is true.
  void Validate() const;
};

struct BackendConfig {
  std::string endpoint_url = "http://127.0.0.1:11434";
  std::string path = "/api/generate";
  std::string model_name = "qwen3:8b";
  SamplingOptions options;
  double timeout_s = 120.0;
  int max_retries = 2;
  double backoff_initial_s = 0.5;  // doubles after each failed attempt
  bool allow_remote = false;       // permit non-loopback endpoints

  void Validate() const;
};

// Host part of an http:// URL; throws kConfig on anything else.
std::string EndpointHost(std::string_view url);
bool IsLoopbackHost(std::string_view host);

// Byte-stable JSON body: {"model", "options": {...}, "prompt", "stream"}.
std::string BuildGenerateRequest(const BackendConfig& config, std::string_view prompt);

// Extracts "response" from a generate reply; throws kMalformedResponse.
std::string ParseGenerateResponse(std::string_view body);

// Lowercase hex SHA-256 of the exact prompt bytes.
std::string PromptFingerprint(std::string_view prompt);

// A text-completion source. Implementations are safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string Complete(std::string_view prompt) const = 0;
  virtual const std::string& name() const = 0;
};

// Talks to a local generate endpoint. Transport failures are retried up to
// max_retries times with exponential backoff, then rethrown as the last
// attempt's gb::Error (kConnectionRefused, kHttpStatus, kTimeout or
// kMalformedResponse).
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);

  std::string Complete(std::string_view prompt) const override;
  const std::string& name() const override { return config_.model_name; }
  const BackendConfig& config() const { return config_; }

  // Total HTTP attempts made by this instance.
  int attempts() const { return attempts_.load(); }

 private:
  std::string Attempt(const std::string& body) const;

  BackendConfig config_;
  mutable std::atomic<int> attempts_{0};
};

using FixtureMap = std::map<std::string, std::string>;  // fingerprint -> response

// Fixture files are a JSON object mapping fingerprint to response text.
FixtureMap LoadFixtureFile(const std::string& path);
void SaveFixtureFile(const std::string& path, const FixtureMap& fixtures);

enum class MissingFixture {
  kError,     // throw kMissingFixture
  kFallback,  // answer with the fallback text
};

inline constexpr std::string_view kFallbackResponse = "Classification: NEITHER";

// Replays canned responses keyed by PromptFingerprint.
class MockBackend : public Backend {
 public:
  MockBackend(std::string name, FixtureMap fixtures,
              MissingFixture policy = MissingFixture::kError,
              std::string fallback = std::string(kFallbackResponse));

  std::string Complete(std::string_view prompt) const override;
  const std::string& name() const override { return name_; }
  const FixtureMap& fixtures() const { return fixtures_; }

 private:
  std::string name_;
  FixtureMap fixtures_;
  MissingFixture policy_;
  std::string fallback_;
};

// Forwards to another backend and keeps every (fingerprint, response) pair,
// so a live run can be replayed later through MockBackend.
class RecordingBackend : public Backend {
 public:
  explicit RecordingBackend(const Backend& inner) : inner_(inner) {}

  std::string Complete(std::string_view prompt) const override;
  const std::string& name() const override { return inner_.name(); }

  FixtureMap recorded() const;

 private:
  const Backend& inner_;
  mutable std::mutex mu_;
  mutable FixtureMap recorded_;
};

// Reads the `backend:` block of a YAML config (see docs/formats.md).
BackendConfig ParseBackendConfig(std::string_view yaml_text);

// GB_ENDPOINT and GB_MODEL, when set, replace the endpoint and model.
void ApplyBackendEnvOverrides(BackendConfig& config);

}  // namespace gb

#endif  // GESTUREBRIDGE_LLM_HPP_
