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

// gb gsd classify | eval | fixture | prompt

#include <glog/logging.h>

#include <algorithm>
#include <iostream>

#include "context.hpp"
#include "gesturebridge/corpus.hpp"
#include "gesturebridge/eval.hpp"
#include "gesturebridge/file_io.hpp"
#include "json.hpp"

namespace gb::cli {

namespace {

struct ClassifyArgs {
  std::string in;
  std::string sentence;
  std::string out;
  bool no_timing = false;
};

struct EvalArgs {
  std::string dataset;
  std::string out;
  std::string name;
};

struct FixtureArgs {
  std::string responses;
  std::string out;
};

struct PromptArgs {
  std::string sentence;
};

void RunClassify(const GlobalOptions& g, const ClassifyArgs& a) {
  if (a.in.empty() == a.sentence.empty()) {
    throw Error(ErrorCode::kUsage, "give exactly one of --in or --sentence");
  }
  Context ctx(g);
  const PromptTemplate tmpl = ctx.LoadTemplate();
  std::vector<ClassifyRequest> requests;
  if (!a.sentence.empty()) {
    requests.push_back({"s0", a.sentence});
  } else {
    for (const Sentence& s : ParseSentencesJsonl(ReadFile(a.in))) {
      requests.push_back({s.id, s.text});
    }
  }
  const auto outcomes = ClassifyAll(requests, ctx.backend(), tmpl, ctx.config().concurrency);
  std::string out;
  std::optional<Error> first_failure;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].result) {
      out += ClassificationToJson(*outcomes[i].result, !a.no_timing) + "\n";
    } else {
      LOG(ERROR) << requests[i].sentence_id << ": " << outcomes[i].error;
      if (!first_failure) first_failure.emplace(outcomes[i].error_code, outcomes[i].error);
    }
  }
  ctx.Write(ctx.OutputPath(a.out, "labels.jsonl"), out);
  ctx.Finish();
  if (first_failure) throw *first_failure;
}

void RunEval(const GlobalOptions& g, const EvalArgs& a) {
  Context ctx(g);
  const PromptTemplate tmpl = ctx.LoadTemplate();
  const auto items = EvalItemsFromDataset(ParseDatasetJsonl(ReadFile(a.dataset)));
  const Backend& backend = ctx.backend();
  const std::string model = a.name.empty() ? backend.name() : a.name;
  const EvalResult r = EvaluateModel(items, backend, tmpl, model, ctx.config().concurrency);
  const std::string dir = a.out.empty() ? ctx.config().output_dir : a.out;
  ctx.Write(dir + "/eval_report.json", EvalReportJson(r));
  ctx.Write(dir + "/eval_report.txt", EvalReportText(r));
  ctx.Write(dir + "/confusion.csv", ConfusionCsv(r.matrix));
  ctx.Write(dir + "/confusion.svg", ConfusionSvg(r.matrix, "Confusion matrix: " + model));
  ctx.Write(dir + "/eval_log.jsonl", EvalLogJsonl(r));
  ctx.Finish();
  std::cout << EvalReportText(r);
  if (!r.valid) {
    // Surface the first failure's class: transport exits 3, a missing
    // fixture exits 2.
    const auto first = std::find_if(r.log.begin(), r.log.end(),
                                    [](const EvalLogEntry& e) { return !e.error.empty(); });
    throw Error(first == r.log.end() ? ErrorCode::kInput : first->error_code,
                std::to_string(r.failures) + " of " + std::to_string(items.size()) +
                    " classifications failed; partial report written and marked invalid");
  }
}

// Each line {"text", "response"}: the fixture maps the prompt built for
// `text` with the active template to `response`.
void RunFixture(const GlobalOptions& g, const FixtureArgs& a) {
  Context ctx(g);
  const PromptTemplate tmpl = ctx.LoadTemplate();
  FixtureMap fixtures;
  const std::string responses = ReadFile(a.responses);
  const auto lines = SplitLines(responses);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      fixtures[PromptFingerprint(BuildPrompt(tmpl, j.at("text").get<std::string>()))] =
          j.at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), static_cast<int>(i) + 1);
    }
  }
  const std::string path = ctx.OutputPath(a.out, "fixture.json");
  SaveFixtureFile(path, fixtures);
  std::cout << fixtures.size() << " fixtures written to " << path << "\n";
}

void RunPrompt(const GlobalOptions& g, const PromptArgs& a) {
  Context ctx(g);
  const std::string prompt = BuildPrompt(ctx.LoadTemplate(), a.sentence);
  std::cout << prompt << "\n";
  std::cerr << "fingerprint " << PromptFingerprint(prompt) << ", ~"
            << EstimatePromptTokens(prompt) << " tokens\n";
}

}  // namespace

void AddGsdCommands(CLI::App& app, GlobalOptions& g) {
  CLI::App* gsd = app.add_subcommand("gsd", "Gesture sentence detection");
  gsd->require_subcommand(1);

  auto ca = std::make_shared<ClassifyArgs>();
  CLI::App* c = gsd->add_subcommand("classify", "Label sentences as Consent/Instruction/Neither");
  c->add_option("--in", ca->in, "Sentences JSONL ({sentence_id, text})");
  c->add_option("--sentence", ca->sentence, "Classify a single sentence");
  c->add_option("--out", ca->out, "Labels JSONL (default <out-dir>/labels.jsonl, - for stdout)");
  c->add_flag("--no-timing", ca->no_timing, "Omit latency_s so output is byte-reproducible");
  c->callback([&g, ca] { RunClassify(g, *ca); });

  auto ea = std::make_shared<EvalArgs>();
  CLI::App* e = gsd->add_subcommand("eval", "Evaluate a model on a finalized dataset");
  e->add_option("--dataset", ea->dataset, "Dataset JSONL with final labels")->required();
  e->add_option("--report-dir", ea->out, "Directory for report files (default <out-dir>)");
  e->add_option("--name", ea->name, "Model name shown in the report");
  e->callback([&g, ea] { RunEval(g, *ea); });

  auto fa = std::make_shared<FixtureArgs>();
  CLI::App* f = gsd->add_subcommand("fixture", "Build a mock fixture from canned responses");
  f->add_option("--responses", fa->responses, "JSONL of {text, response}")->required();
  f->add_option("--out", fa->out, "Fixture JSON (default <out-dir>/fixture.json)");
  f->callback([&g, fa] { RunFixture(g, *fa); });

  auto pa = std::make_shared<PromptArgs>();
  CLI::App* p = gsd->add_subcommand("prompt", "Print the prompt built for a sentence");
  p->add_option("--sentence", pa->sentence, "Sentence to embed")->required();
  p->callback([&g, pa] { RunPrompt(g, *pa); });
}

}  // namespace gb::cli
