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

// Annotated conversation corpus: sentence reconstruction from ASR segments,
// multi-model annotation, consensus, human review and statistics.

#ifndef GESTUREBRIDGE_CORPUS_HPP_
#define GESTUREBRIDGE_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesturebridge/gsd.hpp"
#include "gesturebridge/llm.hpp"

namespace gb {

struct AsrSegment {
  std::string text;
  double start = 0.0;  // s
  double end = 0.0;    // s
  std::string source_id;
};

struct Sentence {
  std::string id;
  std::string text;
  double start = 0.0;
  double end = 0.0;
  std::string source_id;
  bool tail_fragment = false;  // source ended before a terminal mark
};

// {"text", "start", "end", "source_id"} per line.
std::vector<AsrSegment> ParseSegmentsJsonl(std::string_view text);

// True if the fragment ends in '.', '?' or '!' (closing quotes/brackets
// allowed after the mark) and the final word is not an honorific such as
// "Dr.".
bool EndsSentence(std::string_view fragment);

// Joins consecutive fragments of each source with single spaces until one
// ends a sentence. Sources are processed in order of first appearance; ids
// are "<source_id>-<index>" with a zero-padded 4-digit index. Throws
// kOrdering naming the source when a segment starts before its predecessor
// ends, and kInput when a segment ends before it starts.
std::vector<Sentence> MergeSegments(const std::vector<AsrSegment>& segments);

std::string SentenceToJson(const Sentence& s);
std::string SentencesToJsonl(const std::vector<Sentence>& sentences);
// Accepts "sentence_id" or "id" for the identifier.
std::vector<Sentence> ParseSentencesJsonl(std::string_view text);

struct ClipBoundary {
  std::string sentence_id;
  double start = 0.0;
  double end = 0.0;
};

// [max(0, start - padding), end + padding] per sentence.
std::vector<ClipBoundary> ClipBoundaries(const std::vector<Sentence>& sentences,
                                         double padding);
// "sentence_id,start,end" header plus one row per clip.
std::string CutListCsv(const std::vector<ClipBoundary>& clips);

struct AnnotationRecord {
  std::string sentence_id;
  std::string annotator;
  Label label = Label::kNeither;  // never Unknown
  std::string reasoning;
  bool anomaly = false;  // model answered outside the label set twice
};

struct Annotator {
  std::string name;
  const Backend* backend = nullptr;
};

struct AnnotationFailure {
  std::string sentence_id;
  std::string annotator;
  std::string message;
};

struct AnnotationRun {
  std::vector<AnnotationRecord> records;  // sentence-major, annotator order
  std::vector<AnnotationFailure> failures;
  std::size_t anomalies = 0;
};

// One record per (sentence, annotator). An Unknown answer is asked once
// more; a second Unknown is recorded as Neither with the anomaly flag.
// Transport failures are collected, not thrown.
AnnotationRun AnnotateCorpus(const std::vector<Sentence>& sentences,
                             const std::vector<Annotator>& annotators,
                             const PromptTemplate& tmpl, int concurrency = 4);

// Votes indexed by label (Consent, Instruction, Neither).
using VoteCounts = std::array<int, 3>;

struct ConsensusOutcome {
  std::string sentence_id;
  bool unanimous = false;
  VoteCounts votes{};
  std::optional<Label> final_label;
  std::optional<std::string> resolved_by;
  // Unanimous Consent/Instruction still need human validation.
  bool needs_review = false;

  bool split() const { return !unanimous; }
};

// Records must all belong to one sentence. Throws kInput when empty or
// when a record carries Unknown.
ConsensusOutcome Consensus(std::span<const AnnotationRecord> records);

// Groups by sentence_id in first-appearance order.
std::vector<ConsensusOutcome> ConsensusAll(const std::vector<AnnotationRecord>& records);

// Fraction of outcomes that are not unanimous. Throws kInput when empty.
double DisagreementRate(const std::vector<ConsensusOutcome>& outcomes);

// One row of the dataset file.
struct DatasetEntry {
  Sentence sentence;
  std::vector<AnnotationRecord> annotations;
  ConsensusOutcome consensus;
  std::optional<Label> human_label;

  std::optional<Label> final_label() const { return consensus.final_label; }
};

std::vector<DatasetEntry> BuildDataset(const std::vector<Sentence>& sentences,
                                       const std::vector<AnnotationRecord>& records);

std::string DatasetToJsonl(const std::vector<DatasetEntry>& dataset);
std::vector<DatasetEntry> ParseDatasetJsonl(std::string_view text);

enum class ReviewReason { kSplit, kValidate, kAudit };
std::string_view ReviewReasonName(ReviewReason r);

// A row of the review queue. The reviewer fills in human_label and
// reviewer, then the file is re-ingested with ApplyReviews.
struct ReviewItem {
  std::string sentence_id;
  std::string text;
  ReviewReason reason = ReviewReason::kSplit;
  VoteCounts votes{};
  std::optional<Label> proposed_label;
  std::optional<Label> human_label;
  std::optional<std::string> reviewer;
};

// Split outcomes and unanimous Consent/Instruction outcomes.
std::vector<ReviewItem> ReviewQueue(const std::vector<DatasetEntry>& dataset);
// Audit rows for AuditSelection's picks.
std::vector<ReviewItem> AuditQueue(const std::vector<DatasetEntry>& dataset);

std::string ReviewQueueToJsonl(const std::vector<ReviewItem>& items);
std::vector<ReviewItem> ParseReviewQueueJsonl(std::string_view text);

struct ReconcileSummary {
  std::size_t applied = 0;
  std::size_t pending = 0;  // rows without a human label
};

// Applies every reviewed row: final label and resolved_by are set from the
// human decision and needs_review is cleared. Throws kInput for unknown
// sentence ids, Unknown human labels, or a label without a reviewer.
ReconcileSummary ApplyReviews(std::vector<DatasetEntry>& dataset,
                              const std::vector<ReviewItem>& reviews);

// Among finalized Neither rows, the ceil(20%) longest by character count
// (UTF-8 code points), ties to the earlier row. Ids are returned in
// selection order.
std::vector<std::string> AuditSelection(const std::vector<DatasetEntry>& dataset);

struct LabelCounts {
  std::size_t consent = 0;
  std::size_t instruction = 0;
  std::size_t neither = 0;
  std::size_t total = 0;

  bool operator==(const LabelCounts&) const = default;
};

LabelCounts CountLabels(std::span<const Label> labels);

// Per-class counts of final labels. Throws kInput if any row is not final.
LabelCounts DatasetCounts(const std::vector<DatasetEntry>& dataset);

// {"Consent", "Instruction", "Neither", "total"}; parsing validates that
// the classes sum to the total.
std::string LabelCountsToJson(const LabelCounts& c);
LabelCounts ParseLabelCountsJson(std::string_view json_text);

struct DatasetStats {
  LabelCounts counts;
  double disagreement_rate = 0.0;
  std::size_t anomalies = 0;
  // Rows carrying a human label whose model consensus was unanimous; the
  // agreement rate is measured over exactly these rows.
  std::size_t human_checked = 0;
  std::size_t human_agreed = 0;

  std::optional<double> human_agreement() const;
};

DatasetStats ComputeDatasetStats(const std::vector<DatasetEntry>& dataset);
std::string DatasetStatsToJson(const DatasetStats& stats);
std::string DatasetStatsText(const DatasetStats& stats);

}  // namespace gb

#endif  // GESTUREBRIDGE_CORPUS_HPP_
