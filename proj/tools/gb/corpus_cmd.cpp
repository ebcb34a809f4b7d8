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

// gb corpus merge | annotate | reconcile | audit | stats

#include <glog/logging.h>

#include <iostream>

#include "context.hpp"
#include "gesturebridge/corpus.hpp"
#include "gesturebridge/file_io.hpp"
#include "json.hpp"

namespace gb::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct MergeArgs {
  std::string segments;
  double padding = 0.0;
};

struct AnnotateArgs {
  std::string sentences;
  std::vector<std::string> annotators;
};

struct ReconcileArgs {
  std::string dataset;
  std::string reviews;
  std::string out;
};

struct DatasetArgs {
  std::string dataset;
  std::string out;
};

void RunMerge(const GlobalOptions& g, const MergeArgs& a) {
  Context ctx(g);
  const auto sentences = MergeSegments(ParseSegmentsJsonl(ReadFile(a.segments)));
  ctx.Write(ctx.OutputPath("", "sentences.jsonl"), SentencesToJsonl(sentences));
  ctx.Write(ctx.OutputPath("", "cutlist.csv"), CutListCsv(ClipBoundaries(sentences, a.padding)));
  std::size_t tails = 0;
  for (const Sentence& s : sentences) tails += s.tail_fragment ? 1 : 0;
  std::cout << ojson{{"sentences", sentences.size()}, {"tail_fragments", tails}}.dump() << "\n";
}

void RunAnnotate(const GlobalOptions& g, const AnnotateArgs& a) {
  Context ctx(g);
  const PromptTemplate tmpl = ctx.LoadTemplate();
  const auto sentences = ParseSentencesJsonl(ReadFile(a.sentences));
  std::vector<std::unique_ptr<Backend>> backends;
  std::vector<Annotator> annotators;
  for (const std::string& spec : a.annotators) {
    const auto eq = spec.find('=');
    const std::string name = spec.substr(0, eq);
    const std::string fixture = eq == std::string::npos ? "" : spec.substr(eq + 1);
    if (name.empty()) throw Error(ErrorCode::kUsage, "annotator spec '" + spec + "' has no name");
    backends.push_back(ctx.MakeBackend(name, fixture));
    annotators.push_back({name, backends.back().get()});
  }
  const AnnotationRun run = AnnotateCorpus(sentences, annotators, tmpl, ctx.config().concurrency);
  for (const AnnotationFailure& f : run.failures) {
    LOG(ERROR) << f.annotator << " failed on " << f.sentence_id << ": " << f.message;
  }
  const auto dataset = BuildDataset(sentences, run.records);
  ctx.Write(ctx.OutputPath("", "dataset.jsonl"), DatasetToJsonl(dataset));
  const auto queue = ReviewQueue(dataset);
  ctx.Write(ctx.OutputPath("", "review_queue.jsonl"), ReviewQueueToJsonl(queue));
  std::cout << ojson{{"sentences", sentences.size()},
                     {"records", run.records.size()},
                     {"failures", run.failures.size()},
                     {"anomalies", run.anomalies},
                     {"review_queue", queue.size()}}
                   .dump()
            << "\n";
}

void RunReconcile(const GlobalOptions& g, const ReconcileArgs& a) {
  Context ctx(g);
  auto dataset = ParseDatasetJsonl(ReadFile(a.dataset));
  const ReconcileSummary summary =
      ApplyReviews(dataset, ParseReviewQueueJsonl(ReadFile(a.reviews)));
  const auto remaining = ReviewQueue(dataset);
  ctx.Write(ctx.OutputPath(a.out, "dataset.jsonl"), DatasetToJsonl(dataset));
  ctx.Write(ctx.OutputPath("", "review_queue.jsonl"), ReviewQueueToJsonl(remaining));
  std::cout << ojson{{"applied", summary.applied},
                     {"pending", summary.pending},
                     {"still_unresolved", remaining.size()}}
                   .dump()
            << "\n";
}

void RunAudit(const GlobalOptions& g, const DatasetArgs& a) {
  Context ctx(g);
  const auto items = AuditQueue(ParseDatasetJsonl(ReadFile(a.dataset)));
  ctx.Write(ctx.OutputPath(a.out, "audit_queue.jsonl"), ReviewQueueToJsonl(items));
  std::cout << ojson{{"audit_rows", items.size()}}.dump() << "\n";
}

void RunStats(const GlobalOptions& g, const DatasetArgs& a) {
  Context ctx(g);
  const DatasetStats stats = ComputeDatasetStats(ParseDatasetJsonl(ReadFile(a.dataset)));
  ctx.Write(ctx.OutputPath(a.out, "stats.json"), DatasetStatsToJson(stats));
  std::cout << DatasetStatsText(stats);
}

}  // namespace

void AddCorpusCommands(CLI::App& app, GlobalOptions& g) {
  CLI::App* corpus = app.add_subcommand("corpus", "Annotated corpus construction");
  corpus->require_subcommand(1);

  auto ma = std::make_shared<MergeArgs>();
  CLI::App* m = corpus->add_subcommand("merge", "Rebuild sentences from ASR segments");
  m->add_option("--segments", ma->segments, "Segments JSONL ({text, start, end, source_id})")
      ->required();
  m->add_option("--padding", ma->padding, "Clip padding in seconds for the cut list")
      ->check(CLI::NonNegativeNumber);
  m->callback([&g, ma] { RunMerge(g, *ma); });

  auto aa = std::make_shared<AnnotateArgs>();
  CLI::App* an = corpus->add_subcommand("annotate", "Annotate sentences with several models");
  an->add_option("--sentences", aa->sentences, "Sentences JSONL")->required();
  an->add_option("--annotator", aa->annotators,
                 "NAME or NAME=FIXTURE; a fixture replays, a bare name queries the endpoint")
      ->required();
  an->callback([&g, aa] { RunAnnotate(g, *aa); });

  auto ra = std::make_shared<ReconcileArgs>();
  CLI::App* r = corpus->add_subcommand("reconcile", "Apply a reviewed queue to the dataset");
  r->add_option("--dataset", ra->dataset, "Dataset JSONL")->required();
  r->add_option("--reviews", ra->reviews, "Review queue JSONL with human_label/reviewer")
      ->required();
  r->add_option("--out", ra->out, "Updated dataset (default <out-dir>/dataset.jsonl)");
  r->callback([&g, ra] { RunReconcile(g, *ra); });

  auto da = std::make_shared<DatasetArgs>();
  CLI::App* au = corpus->add_subcommand("audit", "Queue the longest Neither rows for audit");
  au->add_option("--dataset", da->dataset, "Dataset JSONL")->required();
  au->add_option("--out", da->out, "Audit queue (default <out-dir>/audit_queue.jsonl)");
  au->callback([&g, da] { RunAudit(g, *da); });

  auto sa = std::make_shared<DatasetArgs>();
  CLI::App* s = corpus->add_subcommand("stats", "Label counts and agreement statistics");
  s->add_option("--dataset", sa->dataset, "Finalized dataset JSONL")->required();
  s->add_option("--out", sa->out, "Stats JSON (default <out-dir>/stats.json)");
  s->callback([&g, sa] { RunStats(g, *sa); });
}

}  // namespace gb::cli
