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

#include <glog/logging.h>

#include <iostream>

#include "context.hpp"
#include "gesturebridge/trajectory.hpp"
#include "json.hpp"

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;
  FLAGS_minloglevel = google::GLOG_WARNING;

  using gb::cli::ErrorJson;
  gb::cli::GlobalOptions g;
  CLI::App app{"gb: speech-act gesture triggering and robot motion retargeting"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", g.config_path, "Pipeline config YAML");
  app.add_option("--endpoint", g.endpoint, "LLM server URL (overrides GB_ENDPOINT)");
  app.add_option("--model", g.model, "Model name (overrides GB_MODEL)");
  app.add_flag("--allow-remote", g.allow_remote, "Permit a non-loopback endpoint");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs");
  app.add_option("--template", g.template_path, "Prompt template YAML");
  app.add_option("--profile", g.profile_path, "Robot profile YAML");
  app.add_option("--mapping", g.mapping_path, "BVH joint mapping YAML");
  app.add_option("--mock", g.mock_path, "Replay responses from a fixture file");
  app.add_option("--mock-mode", g.mock_mode, "strict: missing fixture is an error; lenient: "
                                              "answer Classification: NEITHER")
      ->check(CLI::IsMember({"strict", "lenient"}));
  app.add_option("--record", g.record_path, "Save every backend response as a fixture file");
  app.add_option("--concurrency", g.concurrency, "Requests in flight (default 4)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", g.verbose, "Info-level logging")->each([](const std::string&) {
    FLAGS_minloglevel = google::GLOG_INFO;
  });

  gb::cli::AddGsdCommands(app, g);
  gb::cli::AddCorpusCommands(app, g);
  gb::cli::AddMotionCommands(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << ErrorJson("usage", e.what(), 1) << "\n";
    return 1;
  } catch (const gb::SafetyError& e) {
    nlohmann::ordered_json v = nlohmann::ordered_json::array();
    for (const gb::VelocityViolation& x : e.violations()) {
      v.push_back({{"joint", x.joint_name},
                   {"frame", x.frame},
                   {"velocity", x.velocity},
                   {"limit", x.limit}});
    }
    nlohmann::ordered_json extra;
    extra["violations"] = std::move(v);
    std::cerr << ErrorJson("safety", e.what(), e.exit_code(), extra.dump()) << "\n";
    return e.exit_code();
  } catch (const gb::Error& e) {
    std::cerr << ErrorJson(gb::ErrorCodeName(e.code()), e.what(), e.exit_code()) << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << ErrorJson("internal", e.what(), 2) << "\n";
    return 2;
  }
  return 0;
}
