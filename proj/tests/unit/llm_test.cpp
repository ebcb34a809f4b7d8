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

#include <arpa/inet.h>
#include <gtest/gtest.h>
#include <netinet/in.h>
#include <stdlib.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "gesturebridge/llm.hpp"
// Before httplib: resolv.h defines a _res macro that breaks Eigen.
#include "test_support.hpp"

#include "httplib.h"

namespace gb {
namespace {

using nlohmann::json;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gb::Error thrown";
  return ErrorCode::kInput;
}

// Local generate endpoint on an ephemeral port. The handler decides the
// reply; every request body is kept.
class FakeServer {
 public:
  explicit FakeServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/api/generate", [this, handler](const httplib::Request& req,
                                                  httplib::Response& res) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        bodies_.push_back(req.body);
        content_types_.push_back(req.get_header_value("Content-Type"));
      }
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  BackendConfig Config() const {
    BackendConfig c;
    c.endpoint_url = "http://127.0.0.1:" + std::to_string(port_);
    c.timeout_s = 5.0;
    c.backoff_initial_s = 0.01;
    return c;
  }
  std::vector<std::string> bodies() const {
    std::lock_guard<std::mutex> lock(mu_);
    return bodies_;
  }
  std::vector<std::string> content_types() const {
    std::lock_guard<std::mutex> lock(mu_);
    return content_types_;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::vector<std::string> bodies_;
  std::vector<std::string> content_types_;
};

void Reply(httplib::Response& res, const std::string& text) {
  res.set_content(json{{"model", "qwen3:8b"}, {"response", text}, {"done", true}}.dump(),
                  "application/json");
}

TEST(RequestTest, DefaultBodyIsExact) {
  EXPECT_EQ(BuildGenerateRequest(BackendConfig{}, "hi"),
            "{\"model\":\"qwen3:8b\",\"options\":{\"num_ctx\":10000,\"num_predict\":1000,"
            "\"temperature\":0.1,\"top_k\":10,\"top_p\":0.9},\"prompt\":\"hi\",\"stream\":false}");
}

TEST(RequestTest, BodyIsByteStable) {
  BackendConfig c;
  const std::string p = "Sentence: \"Don't \\ move\"\n\tClassification:é";
  const std::string a = BuildGenerateRequest(c, p);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(BuildGenerateRequest(c, p), a);
  EXPECT_EQ(json::parse(a).at("prompt").get<std::string>(), p);
}

TEST(RequestTest, ResponseExtraction) {
  EXPECT_EQ(ParseGenerateResponse("{\"response\": \"ok\", \"done\": true}"), "ok");
  EXPECT_EQ(CodeOf([] { ParseGenerateResponse("{\"done\": true}"); }),
            ErrorCode::kMalformedResponse);
  EXPECT_EQ(CodeOf([] { ParseGenerateResponse("<html>"); }), ErrorCode::kMalformedResponse);
  EXPECT_EQ(CodeOf([] { ParseGenerateResponse("{\"response\": 3}"); }),
            ErrorCode::kMalformedResponse);
}

TEST(ConfigTest, ValidationRules) {
  BackendConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.options.stream = true;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kConfig);
  c = {};
  c.options.top_p = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c = {};
  c.endpoint_url = "http://10.1.2.3:11434";
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kConfig);
  c.allow_remote = true;
  EXPECT_NO_THROW(c.Validate());
  c = {};
  c.endpoint_url = "https://localhost";
  EXPECT_THROW(c.Validate(), Error);
}

TEST(ConfigTest, LoopbackHosts) {
  EXPECT_EQ(EndpointHost("http://localhost:11434/x"), "localhost");
  EXPECT_EQ(EndpointHost("http://[::1]:8080"), "::1");
  EXPECT_TRUE(IsLoopbackHost("localhost"));
  EXPECT_TRUE(IsLoopbackHost("127.0.0.1"));
  EXPECT_TRUE(IsLoopbackHost("127.8.9.1"));
  EXPECT_TRUE(IsLoopbackHost("::1"));
  EXPECT_FALSE(IsLoopbackHost("example.com"));
  EXPECT_FALSE(IsLoopbackHost("128.0.0.1"));
  EXPECT_FALSE(IsLoopbackHost("127.evil.com"));
}

TEST(ConfigTest, YamlAndEnvironment) {
  const BackendConfig c = ParseBackendConfig(
      "backend:\n  endpoint: http://localhost:9000\n  model: gemma3:4b\n  options:\n"
      "    temperature: 0.3\n    top_k: 5\n");
  EXPECT_EQ(c.endpoint_url, "http://localhost:9000");
  EXPECT_EQ(c.model_name, "gemma3:4b");
  EXPECT_EQ(c.options.temperature, 0.3);
  EXPECT_EQ(c.options.top_k, 5);
  EXPECT_EQ(c.options.num_ctx, 10000);
  EXPECT_THROW(ParseBackendConfig("backend:\n  options:\n    top_k: [1\n"), Error);

  BackendConfig env = c;
  setenv("GB_ENDPOINT", "http://127.0.0.1:1234", 1);
  setenv("GB_MODEL", "llama3.2:3b", 1);
  ApplyBackendEnvOverrides(env);
  unsetenv("GB_ENDPOINT");
  unsetenv("GB_MODEL");
  EXPECT_EQ(env.endpoint_url, "http://127.0.0.1:1234");
  EXPECT_EQ(env.model_name, "llama3.2:3b");
  BackendConfig untouched = c;
  ApplyBackendEnvOverrides(untouched);
  EXPECT_EQ(untouched.model_name, "gemma3:4b");
}

TEST(FingerprintTest, KnownDigest) {
  EXPECT_EQ(PromptFingerprint("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(PromptFingerprint(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(MockTest, StrictAndLenient) {
  FixtureMap f{{PromptFingerprint("known"), "Classification: CONSENT"}};
  const MockBackend strict("m", f);
  EXPECT_EQ(strict.Complete("known"), "Classification: CONSENT");
  EXPECT_EQ(CodeOf([&] { strict.Complete("other"); }), ErrorCode::kMissingFixture);
  const MockBackend lenient("m", f, MissingFixture::kFallback);
  EXPECT_EQ(lenient.Complete("other"), kFallbackResponse);
  EXPECT_EQ(lenient.name(), "m");
}

TEST(MockTest, FixtureFiles) {
  const std::string dir = testing::TempDir() + "/gb_fixture_test";
  std::filesystem::create_directories(dir);
  const FixtureMap f{{"aa", "one"}, {"bb", "two\nlines"}};
  SaveFixtureFile(dir + "/f.json", f);
  EXPECT_EQ(LoadFixtureFile(dir + "/f.json"), f);
  WriteFileAtomic(dir + "/bad.json", "[1, 2");
  EXPECT_EQ(CodeOf([&] { LoadFixtureFile(dir + "/bad.json"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([&] { LoadFixtureFile(dir + "/missing.json"); }), ErrorCode::kConfig);
}

TEST(MockTest, RecordThenReplay) {
  const MockBackend lenient("m", {}, MissingFixture::kFallback, "Classification: INSTRUCTION");
  const RecordingBackend rec(lenient);
  EXPECT_EQ(rec.Complete("p1"), "Classification: INSTRUCTION");
  rec.Complete("p2");
  const MockBackend replay("m", rec.recorded());
  EXPECT_EQ(replay.Complete("p1"), "Classification: INSTRUCTION");
  EXPECT_EQ(replay.fixtures().size(), 2u);
}

TEST(HttpTest, WireContract) {
  FakeServer server([](const httplib::Request&, httplib::Response& res) { Reply(res, "pong"); });
  const HttpBackend backend(server.Config());
  EXPECT_EQ(backend.Complete("ping"), "pong");
  ASSERT_EQ(server.bodies().size(), 1u);
  EXPECT_EQ(server.bodies()[0], BuildGenerateRequest(server.Config(), "ping"));
  EXPECT_EQ(server.content_types()[0], "application/json");
  EXPECT_EQ(backend.attempts(), 1);
}

TEST(HttpTest, ServerErrorIsRetriedThenReported) {
  FakeServer server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const HttpBackend backend(server.Config());
  EXPECT_EQ(CodeOf([&] { backend.Complete("x"); }), ErrorCode::kHttpStatus);
  EXPECT_EQ(backend.attempts(), 3);
  EXPECT_EQ(server.bodies().size(), 3u);
}

TEST(HttpTest, TransientFailureRecovers) {
  std::atomic<int> calls{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
    } else {
      Reply(res, "ok");
    }
  });
  const HttpBackend backend(server.Config());
  EXPECT_EQ(backend.Complete("x"), "ok");
  EXPECT_EQ(backend.attempts(), 2);
}

TEST(HttpTest, MalformedBody) {
  FakeServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"done\": true}", "application/json");
  });
  BackendConfig c = server.Config();
  c.max_retries = 0;
  const HttpBackend backend(c);
  EXPECT_EQ(CodeOf([&] { backend.Complete("x"); }), ErrorCode::kMalformedResponse);
}

TEST(HttpTest, RefusedConnection) {
  // Grab a free port, then close it so nothing is listening there.
  int port = 0;
  {
    const int fd = socket(AF_INET, SOCK_STREAM, 0);
    ASSERT_GE(fd, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ASSERT_EQ(bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
    socklen_t len = sizeof(addr);
    ASSERT_EQ(getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len), 0);
    port = ntohs(addr.sin_port);
    close(fd);
  }
  BackendConfig c;
  c.endpoint_url = "http://127.0.0.1:" + std::to_string(port);
  c.backoff_initial_s = 0.01;
  const HttpBackend backend(c);
  try {
    backend.Complete("x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConnectionRefused);
    EXPECT_EQ(e.exit_code(), 3);
  }
  EXPECT_EQ(backend.attempts(), 3);
}

TEST(HttpTest, SlowServerTimesOut) {
  FakeServer server([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(800));
    Reply(res, "late");
  });
  BackendConfig c = server.Config();
  c.timeout_s = 0.2;
  c.max_retries = 0;
  const HttpBackend backend(c);
  EXPECT_EQ(CodeOf([&] { backend.Complete("x"); }), ErrorCode::kTimeout);
}

TEST(HttpTest, EmptyPromptIsRejectedLocally) {
  const HttpBackend backend(BackendConfig{});
  EXPECT_EQ(CodeOf([&] { backend.Complete("  \n"); }), ErrorCode::kInput);
  EXPECT_EQ(backend.attempts(), 0);
}

}  // namespace
}  // namespace gb
