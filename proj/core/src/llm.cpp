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

#include "gesturebridge/llm.hpp"

#include <arpa/inet.h>
#include <glog/logging.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "gesturebridge/error.hpp"
#include "gesturebridge/file_io.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gb {

using nlohmann::json;

void SamplingOptions::Validate() const {
  if (!(temperature >= 0.0)) throw Error(ErrorCode::kConfig, "temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::kConfig, "top_p must be in (0, 1]");
  if (top_k < 1) throw Error(ErrorCode::kConfig, "top_k must be >= 1");
  if (num_predict < 1) throw Error(ErrorCode::kConfig, "num_predict must be >= 1");
  if (num_ctx < 1) throw Error(ErrorCode::kConfig, "num_ctx must be >= 1");
  if (stream) throw Error(ErrorCode::kConfig, "streaming responses are not supported");
}

void BackendConfig::Validate() const {
  options.Validate();
  if (!(timeout_s > 0.0)) throw Error(ErrorCode::kConfig, "timeout must be > 0");
  if (max_retries < 0) throw Error(ErrorCode::kConfig, "max_retries must be >= 0");
  if (!(backoff_initial_s >= 0.0)) throw Error(ErrorCode::kConfig, "backoff must be >= 0");
  if (model_name.empty()) throw Error(ErrorCode::kConfig, "model name is empty");
  if (path.empty() || path.front() != '/') {
    throw Error(ErrorCode::kConfig, "endpoint path must start with '/'");
  }
  const std::string host = EndpointHost(endpoint_url);
  if (!allow_remote && !IsLoopbackHost(host)) {
    throw Error(ErrorCode::kConfig, "refusing non-loopback endpoint " + endpoint_url +
                                        " (set allow_remote to override)");
  }
}

std::string EndpointHost(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw Error(ErrorCode::kConfig, "endpoint must be an http:// URL: " + std::string(url));
  }
  std::string_view rest = url.substr(kScheme.size());
  rest = rest.substr(0, rest.find('/'));
  if (!rest.empty() && rest.front() == '[') {
    const auto close = rest.find(']');
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, "malformed IPv6 endpoint: " + std::string(url));
    }
    return std::string(rest.substr(1, close - 1));
  }
  rest = rest.substr(0, rest.find(':'));
  if (rest.empty()) throw Error(ErrorCode::kConfig, "endpoint has no host: " + std::string(url));
  return std::string(rest);
}

bool IsLoopbackHost(std::string_view host) {
  if (host == "localhost" || host == "::1") return true;
  in_addr v4{};
  const std::string h(host);
  return inet_pton(AF_INET, h.c_str(), &v4) == 1 && (ntohl(v4.s_addr) >> 24) == 127;
}

std::string BuildGenerateRequest(const BackendConfig& config, std::string_view prompt) {
  const SamplingOptions& o = config.options;
  json body = {
      {"model", config.model_name},
      {"prompt", std::string(prompt)},
      {"stream", o.stream},
      {"options",
       {{"temperature", o.temperature},
        {"top_p", o.top_p},
        {"top_k", o.top_k},
        {"num_predict", o.num_predict},
        {"num_ctx", o.num_ctx}}},
  };
  return body.dump();
}

std::string ParseGenerateResponse(std::string_view body) {
  try {
    const json j = json::parse(body);
    const auto it = j.find("response");
    if (it == j.end() || !it->is_string()) {
      throw Error(ErrorCode::kMalformedResponse, "response body lacks a 'response' string");
    }
    return it->get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("response is not JSON: ") + e.what());
  }
}

std::string PromptFingerprint(std::string_view prompt) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(prompt.data(), prompt.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  config_.Validate();
}

std::string HttpBackend::Attempt(const std::string& body) const {
  ++attempts_;
  httplib::Client client(config_.endpoint_url);
  const auto secs = static_cast<time_t>(config_.timeout_s);
  const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  const httplib::Result res = client.Post(config_.path, body, "application/json");
  if (!res) {
    const httplib::Error err = res.error();
    const std::string what = httplib::to_string(err);
    switch (err) {
      case httplib::Error::Connection:
        throw Error(ErrorCode::kConnectionRefused,
                    "cannot connect to " + config_.endpoint_url + ": " + what);
      case httplib::Error::ConnectionTimeout:
      case httplib::Error::Read:
        throw Error(ErrorCode::kTimeout,
                    "no response from " + config_.endpoint_url + " within timeout: " + what);
      default:
        throw Error(ErrorCode::kConnectionRefused,
                    "request to " + config_.endpoint_url + " failed: " + what);
    }
  }
  if (res->status >= 400) {
    throw Error(ErrorCode::kHttpStatus, "HTTP " + std::to_string(res->status) + " from " +
                                            config_.endpoint_url + config_.path);
  }
  return ParseGenerateResponse(res->body);
}

std::string HttpBackend::Complete(std::string_view prompt) const {
  if (Trim(prompt).empty()) throw Error(ErrorCode::kInput, "empty prompt");
  const std::string body = BuildGenerateRequest(config_, prompt);
  double delay = config_.backoff_initial_s;
  for (int attempt = 0;; ++attempt) {
    try {
      return Attempt(body);
    } catch (const Error& e) {
      if (attempt >= config_.max_retries) throw;
      LOG(WARNING) << "attempt " << attempt + 1 << " failed (" << e.what() << "), retrying in "
                   << delay << " s";
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      delay *= 2.0;
    }
  }
}

FixtureMap LoadFixtureFile(const std::string& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("fixture file: ") + e.what());
  }
  try {
    return json::parse(text).get<FixtureMap>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, "fixture file " + path + ": " + e.what());
  }
}

void SaveFixtureFile(const std::string& path, const FixtureMap& fixtures) {
  WriteFileAtomic(path, json(fixtures).dump(2) + "\n");
}

MockBackend::MockBackend(std::string name, FixtureMap fixtures, MissingFixture policy,
                         std::string fallback)
    : name_(std::move(name)),
      fixtures_(std::move(fixtures)),
      policy_(policy),
      fallback_(std::move(fallback)) {}

std::string MockBackend::Complete(std::string_view prompt) const {
  const std::string fp = PromptFingerprint(prompt);
  const auto it = fixtures_.find(fp);
  if (it != fixtures_.end()) return it->second;
  if (policy_ == MissingFixture::kFallback) return fallback_;
  throw Error(ErrorCode::kMissingFixture, "no fixture for prompt fingerprint " + fp);
}

std::string RecordingBackend::Complete(std::string_view prompt) const {
  std::string response = inner_.Complete(prompt);
  std::lock_guard<std::mutex> lock(mu_);
  recorded_[PromptFingerprint(prompt)] = response;
  return response;
}

FixtureMap RecordingBackend::recorded() const {
  std::lock_guard<std::mutex> lock(mu_);
  return recorded_;
}

BackendConfig ParseBackendConfig(std::string_view yaml_text) {
  BackendConfig c;
  try {
    YAML::Node root = YAML::Load(std::string(yaml_text));
    if (root.IsNull()) return c;
    if (root["backend"]) root = root["backend"];
    if (root["endpoint"]) c.endpoint_url = root["endpoint"].as<std::string>();
    if (root["path"]) c.path = root["path"].as<std::string>();
    if (root["model"]) c.model_name = root["model"].as<std::string>();
    if (root["timeout_s"]) c.timeout_s = root["timeout_s"].as<double>();
    if (root["max_retries"]) c.max_retries = root["max_retries"].as<int>();
    if (root["backoff_initial_s"]) c.backoff_initial_s = root["backoff_initial_s"].as<double>();
    if (root["allow_remote"]) c.allow_remote = root["allow_remote"].as<bool>();
    if (const YAML::Node o = root["options"]) {
      if (o["temperature"]) c.options.temperature = o["temperature"].as<double>();
      if (o["top_p"]) c.options.top_p = o["top_p"].as<double>();
      if (o["top_k"]) c.options.top_k = o["top_k"].as<int>();
      if (o["num_predict"]) c.options.num_predict = o["num_predict"].as<int>();
      if (o["num_ctx"]) c.options.num_ctx = o["num_ctx"].as<int>();
      if (o["stream"]) c.options.stream = o["stream"].as<bool>();
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, std::string("backend config: ") + e.what());
  }
  return c;
}

void ApplyBackendEnvOverrides(BackendConfig& config) {
  if (const char* v = std::getenv("GB_ENDPOINT"); v != nullptr && *v != '\0') {
    config.endpoint_url = v;
  }
  if (const char* v = std::getenv("GB_MODEL"); v != nullptr && *v != '\0') {
    config.model_name = v;
  }
}

}  // namespace gb
