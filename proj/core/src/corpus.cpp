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

#include "gesturebridge/corpus.hpp"

#include <glog/logging.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "gesturebridge/file_io.hpp"
#include "gesturebridge/parallel.hpp"
#include "json.hpp"

namespace gb {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kHonorifics = {"dr.", "mr.", "mrs.", "ms."};

std::size_t CodePoints(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

template <typename F>
auto WithLine(int line_no, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(e.what(), line_no);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no);
  }
}

template <typename F>
void ForEachJsonLine(std::string_view text, F&& f) {
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = Trim(lines[i]);
    if (line.empty()) continue;
    const int line_no = static_cast<int>(i) + 1;
    WithLine(line_no, [&] {
      f(json::parse(line), line_no);
      return 0;
    });
  }
}

std::size_t LabelIndex(Label l) { return static_cast<std::size_t>(l); }

ojson VotesToJson(const VoteCounts& v) {
  ojson j;
  for (Label l : kTrueLabels) j[std::string(LabelName(l))] = v[LabelIndex(l)];
  return j;
}

VoteCounts VotesFromJson(const json& j) {
  VoteCounts v{};
  for (Label l : kTrueLabels) {
    const std::string key(LabelName(l));
    if (j.contains(key)) v[LabelIndex(l)] = j.at(key).get<int>();
  }
  return v;
}

json OptionalLabel(const std::optional<Label>& l) {
  return l ? json(std::string(LabelName(*l))) : json(nullptr);
}

std::optional<Label> ReadOptionalLabel(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return ParseTrueLabel(j.at(key).get<std::string>());
}

std::optional<std::string> ReadOptionalString(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

std::optional<Label> UnanimousLabel(const ConsensusOutcome& c) {
  if (!c.unanimous) return std::nullopt;
  for (Label l : kTrueLabels) {
    if (c.votes[LabelIndex(l)] > 0) return l;
  }
  return std::nullopt;
}

bool IsFinal(const DatasetEntry& e) {
  return e.consensus.final_label.has_value() && !e.consensus.needs_review;
}

}  // namespace

std::vector<AsrSegment> ParseSegmentsJsonl(std::string_view text) {
  std::vector<AsrSegment> out;
  ForEachJsonLine(text, [&](const json& j, int) {
    out.push_back({j.at("text").get<std::string>(), j.at("start").get<double>(),
                   j.at("end").get<double>(), j.at("source_id").get<std::string>()});
  });
  return out;
}

bool EndsSentence(std::string_view fragment) {
  std::string_view s = Trim(fragment);
  while (!s.empty() && std::string_view("\"')]").find(s.back()) != std::string_view::npos) {
    s.remove_suffix(1);
  }
  if (s.empty()) return false;
  const char last = s.back();
  if (last == '?' || last == '!') return true;
  if (last != '.') return false;
  const auto space = s.find_last_of(" \t");
  std::string word(space == std::string_view::npos ? s : s.substr(space + 1));
  std::transform(word.begin(), word.end(), word.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(kHonorifics.begin(), kHonorifics.end(), word) == kHonorifics.end();
}

std::vector<Sentence> MergeSegments(const std::vector<AsrSegment>& segments) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const AsrSegment*>> by_source;
  for (const AsrSegment& seg : segments) {
    if (seg.end < seg.start) {
      throw Error(ErrorCode::kInput, "segment of " + seg.source_id + " ends before it starts");
    }
    auto& group = by_source[seg.source_id];
    if (group.empty()) order.push_back(seg.source_id);
    if (!group.empty() && seg.start < group.back()->end) {
      throw Error(ErrorCode::kOrdering,
                  "segments of source " + seg.source_id + " overlap or are out of order at t=" +
                      std::to_string(seg.start));
    }
    group.push_back(&seg);
  }

  std::vector<Sentence> out;
  for (const std::string& source : order) {
    int index = 0;
    Sentence current;
    bool open = false;
    auto flush = [&](bool tail) {
      char id[32];
      std::snprintf(id, sizeof(id), "-%04d", index++);
      current.id = source + id;
      current.source_id = source;
      current.tail_fragment = tail;
      out.push_back(std::move(current));
      current = Sentence{};
      open = false;
    };
    for (const AsrSegment* seg : by_source[source]) {
      const std::string_view frag = Trim(seg->text);
      if (frag.empty()) continue;
      if (!open) {
        current.text = std::string(frag);
        current.start = seg->start;
        open = true;
      } else {
        current.text += ' ';
        current.text += frag;
      }
      current.end = seg->end;
      if (EndsSentence(frag)) flush(false);
    }
    if (open) flush(true);
  }
  return out;
}

std::string SentenceToJson(const Sentence& s) {
  ojson j;
  j["sentence_id"] = s.id;
  j["source_id"] = s.source_id;
  j["text"] = s.text;
  j["start"] = s.start;
  j["end"] = s.end;
  j["tail_fragment"] = s.tail_fragment;
  return j.dump();
}

std::string SentencesToJsonl(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const Sentence& s : sentences) out += SentenceToJson(s) + "\n";
  return out;
}

namespace {

Sentence SentenceFromJson(const json& j) {
  Sentence s;
  s.id = j.contains("sentence_id") ? j.at("sentence_id").get<std::string>()
                                   : j.at("id").get<std::string>();
  s.text = j.at("text").get<std::string>();
  s.start = j.value("start", 0.0);
  s.end = j.value("end", 0.0);
  s.source_id = j.value("source_id", std::string());
  s.tail_fragment = j.value("tail_fragment", false);
  return s;
}

}  // namespace

std::vector<Sentence> ParseSentencesJsonl(std::string_view text) {
  std::vector<Sentence> out;
  ForEachJsonLine(text, [&](const json& j, int) { out.push_back(SentenceFromJson(j)); });
  return out;
}

std::vector<ClipBoundary> ClipBoundaries(const std::vector<Sentence>& sentences,
                                         double padding) {
  if (!(padding >= 0.0)) throw Error(ErrorCode::kInput, "clip padding must be >= 0");
  std::vector<ClipBoundary> clips;
  clips.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    clips.push_back({s.id, std::max(0.0, s.start - padding), s.end + padding});
  }
  return clips;
}

std::string CutListCsv(const std::vector<ClipBoundary>& clips) {
  std::ostringstream ss;
  ss << "sentence_id,start,end\n";
  char buf[64];
  for (const ClipBoundary& c : clips) {
    ss << c.sentence_id;
    std::snprintf(buf, sizeof(buf), ",%.3f,%.3f\n", c.start, c.end);
    ss << buf;
  }
  return ss.str();
}

AnnotationRun AnnotateCorpus(const std::vector<Sentence>& sentences,
                             const std::vector<Annotator>& annotators,
                             const PromptTemplate& tmpl, int concurrency) {
  if (annotators.empty()) throw Error(ErrorCode::kInput, "at least one annotator is required");
  struct Slot {
    std::optional<AnnotationRecord> record;
    std::optional<AnnotationFailure> failure;
  };
  const std::size_t n = sentences.size() * annotators.size();
  std::vector<Slot> slots(n);
  BoundedParallelFor(n, concurrency, [&](std::size_t k) {
    const Sentence& s = sentences[k / annotators.size()];
    const Annotator& a = annotators[k % annotators.size()];
    try {
      ClassificationResult r = Classify(s.id, s.text, *a.backend, tmpl);
      bool anomaly = false;
      if (r.label == Label::kUnknown) {
        r = Classify(s.id, s.text, *a.backend, tmpl);
        if (r.label == Label::kUnknown) {
          LOG(WARNING) << a.name << " answered outside the label set twice for " << s.id;
          anomaly = true;
          r.label = Label::kNeither;
        }
      }
      slots[k].record = AnnotationRecord{s.id, a.name, r.label, r.reasoning, anomaly};
    } catch (const Error& e) {
      slots[k].failure = AnnotationFailure{s.id, a.name, e.what()};
    }
  });
  AnnotationRun run;
  for (Slot& slot : slots) {
    if (slot.record) {
      run.anomalies += slot.record->anomaly ? 1 : 0;
      run.records.push_back(std::move(*slot.record));
    } else if (slot.failure) {
      run.failures.push_back(std::move(*slot.failure));
    }
  }
  return run;
}

ConsensusOutcome Consensus(std::span<const AnnotationRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kInput, "consensus needs at least one record");
  ConsensusOutcome c;
  c.sentence_id = records.front().sentence_id;
  for (const AnnotationRecord& r : records) {
    if (!IsTrueLabel(r.label)) {
      throw Error(ErrorCode::kInput, "annotation of " + r.sentence_id + " carries Unknown");
    }
    if (r.sentence_id != c.sentence_id) {
      throw Error(ErrorCode::kInput, "consensus over records of different sentences");
    }
    ++c.votes[LabelIndex(r.label)];
  }
  const int total = static_cast<int>(records.size());
  for (Label l : kTrueLabels) {
    if (c.votes[LabelIndex(l)] == total) {
      c.unanimous = true;
      c.final_label = l;
      c.needs_review = l == Label::kConsent || l == Label::kInstruction;
    }
  }
  return c;
}

std::vector<ConsensusOutcome> ConsensusAll(const std::vector<AnnotationRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<AnnotationRecord>> groups;
  for (const AnnotationRecord& r : records) {
    auto& g = groups[r.sentence_id];
    if (g.empty()) order.push_back(r.sentence_id);
    g.push_back(r);
  }
  std::vector<ConsensusOutcome> out;
  out.reserve(order.size());
  for (const std::string& id : order) out.push_back(Consensus(groups[id]));
  return out;
}

double DisagreementRate(const std::vector<ConsensusOutcome>& outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::kInput, "disagreement rate of an empty set");
  const auto split = std::count_if(outcomes.begin(), outcomes.end(),
                                   [](const ConsensusOutcome& c) { return c.split(); });
  return static_cast<double>(split) / static_cast<double>(outcomes.size());
}

std::vector<DatasetEntry> BuildDataset(const std::vector<Sentence>& sentences,
                                       const std::vector<AnnotationRecord>& records) {
  std::map<std::string, std::vector<AnnotationRecord>> groups;
  for (const AnnotationRecord& r : records) groups[r.sentence_id].push_back(r);
  std::vector<DatasetEntry> dataset;
  for (const Sentence& s : sentences) {
    auto it = groups.find(s.id);
    if (it == groups.end()) {
      LOG(WARNING) << "sentence " << s.id << " has no annotations; left out of the dataset";
      continue;
    }
    DatasetEntry e;
    e.sentence = s;
    e.annotations = it->second;
    e.consensus = Consensus(e.annotations);
    dataset.push_back(std::move(e));
  }
  return dataset;
}

std::string DatasetToJsonl(const std::vector<DatasetEntry>& dataset) {
  std::string out;
  for (const DatasetEntry& e : dataset) {
    ojson j;
    j["sentence_id"] = e.sentence.id;
    j["source_id"] = e.sentence.source_id;
    j["text"] = e.sentence.text;
    j["start"] = e.sentence.start;
    j["end"] = e.sentence.end;
    j["tail_fragment"] = e.sentence.tail_fragment;
    j["annotations"] = ojson::array();
    for (const AnnotationRecord& r : e.annotations) {
      ojson a;
      a["annotator"] = r.annotator;
      a["label"] = LabelName(r.label);
      a["reasoning"] = r.reasoning;
      a["anomaly"] = r.anomaly;
      j["annotations"].push_back(std::move(a));
    }
    j["consensus"] = {{"outcome", e.consensus.unanimous ? "unanimous" : "split"},
                      {"votes", VotesToJson(e.consensus.votes)}};
    j["needs_review"] = e.consensus.needs_review;
    j["final_label"] = OptionalLabel(e.consensus.final_label);
    j["resolved_by"] =
        e.consensus.resolved_by ? json(*e.consensus.resolved_by) : json(nullptr);
    j["human_label"] = OptionalLabel(e.human_label);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<DatasetEntry> ParseDatasetJsonl(std::string_view text) {
  std::vector<DatasetEntry> out;
  ForEachJsonLine(text, [&](const json& j, int) {
    DatasetEntry e;
    e.sentence = SentenceFromJson(j);
    if (j.contains("annotations")) {
      for (const json& a : j.at("annotations")) {
        e.annotations.push_back({e.sentence.id, a.at("annotator").get<std::string>(),
                                 ParseTrueLabel(a.at("label").get<std::string>()),
                                 a.value("reasoning", std::string()), a.value("anomaly", false)});
      }
    }
    if (!e.annotations.empty()) {
      e.consensus = Consensus(e.annotations);
    } else {
      e.consensus.sentence_id = e.sentence.id;
    }
    // Stored decisions override what the votes alone imply.
    if (j.contains("final_label")) e.consensus.final_label = ReadOptionalLabel(j, "final_label");
    // Bare {sentence_id, text, label} rows are already final.
    if (!j.contains("final_label") && j.contains("label")) {
      e.consensus.final_label = ReadOptionalLabel(j, "label");
    }
    e.consensus.needs_review = j.value("needs_review", e.consensus.needs_review);
    e.consensus.resolved_by = ReadOptionalString(j, "resolved_by");
    e.human_label = ReadOptionalLabel(j, "human_label");
    out.push_back(std::move(e));
  });
  return out;
}

std::string_view ReviewReasonName(ReviewReason r) {
  switch (r) {
    case ReviewReason::kSplit: return "split";
    case ReviewReason::kValidate: return "validate";
    case ReviewReason::kAudit: return "audit";
  }
  return "split";
}

std::vector<ReviewItem> ReviewQueue(const std::vector<DatasetEntry>& dataset) {
  std::vector<ReviewItem> items;
  for (const DatasetEntry& e : dataset) {
    if (e.consensus.resolved_by) continue;
    if (e.consensus.split()) {
      items.push_back({e.sentence.id, e.sentence.text, ReviewReason::kSplit,
                       e.consensus.votes, std::nullopt, std::nullopt, std::nullopt});
    } else if (e.consensus.needs_review) {
      items.push_back({e.sentence.id, e.sentence.text, ReviewReason::kValidate,
                       e.consensus.votes, e.consensus.final_label, std::nullopt, std::nullopt});
    }
  }
  return items;
}

std::vector<ReviewItem> AuditQueue(const std::vector<DatasetEntry>& dataset) {
  std::map<std::string, const DatasetEntry*> by_id;
  for (const DatasetEntry& e : dataset) by_id[e.sentence.id] = &e;
  std::vector<ReviewItem> items;
  for (const std::string& id : AuditSelection(dataset)) {
    const DatasetEntry& e = *by_id.at(id);
    items.push_back({id, e.sentence.text, ReviewReason::kAudit, e.consensus.votes,
                     e.consensus.final_label, std::nullopt, std::nullopt});
  }
  return items;
}

std::string ReviewQueueToJsonl(const std::vector<ReviewItem>& items) {
  std::string out;
  for (const ReviewItem& r : items) {
    ojson j;
    j["sentence_id"] = r.sentence_id;
    j["text"] = r.text;
    j["reason"] = ReviewReasonName(r.reason);
    j["votes"] = VotesToJson(r.votes);
    j["proposed_label"] = OptionalLabel(r.proposed_label);
    j["human_label"] = OptionalLabel(r.human_label);
    j["reviewer"] = r.reviewer ? json(*r.reviewer) : json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ReviewItem> ParseReviewQueueJsonl(std::string_view text) {
  std::vector<ReviewItem> items;
  ForEachJsonLine(text, [&](const json& j, int) {
    ReviewItem r;
    r.sentence_id = j.at("sentence_id").get<std::string>();
    r.text = j.value("text", std::string());
    const std::string reason = j.value("reason", std::string("split"));
    if (reason == "split") {
      r.reason = ReviewReason::kSplit;
    } else if (reason == "validate") {
      r.reason = ReviewReason::kValidate;
    } else if (reason == "audit") {
      r.reason = ReviewReason::kAudit;
    } else {
      throw Error(ErrorCode::kInput, "unknown review reason '" + reason + "'");
    }
    if (j.contains("votes")) r.votes = VotesFromJson(j.at("votes"));
    r.proposed_label = ReadOptionalLabel(j, "proposed_label");
    r.human_label = ReadOptionalLabel(j, "human_label");
    r.reviewer = ReadOptionalString(j, "reviewer");
    items.push_back(std::move(r));
  });
  return items;
}

ReconcileSummary ApplyReviews(std::vector<DatasetEntry>& dataset,
                              const std::vector<ReviewItem>& reviews) {
  std::map<std::string, DatasetEntry*> by_id;
  for (DatasetEntry& e : dataset) by_id[e.sentence.id] = &e;
  ReconcileSummary summary;
  for (const ReviewItem& r : reviews) {
    const auto it = by_id.find(r.sentence_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInput, "review row for unknown sentence " + r.sentence_id);
    }
    if (!r.human_label) {
      ++summary.pending;
      continue;
    }
    if (!r.reviewer || r.reviewer->empty()) {
      throw Error(ErrorCode::kInput, "review row " + r.sentence_id + " has a label but no reviewer");
    }
    DatasetEntry& e = *it->second;
    e.human_label = r.human_label;
    e.consensus.final_label = r.human_label;
    e.consensus.resolved_by = r.reviewer;
    e.consensus.needs_review = false;
    ++summary.applied;
  }
  return summary;
}

std::vector<std::string> AuditSelection(const std::vector<DatasetEntry>& dataset) {
  std::vector<const DatasetEntry*> neither;
  for (const DatasetEntry& e : dataset) {
    if (IsFinal(e) && *e.final_label() == Label::kNeither) neither.push_back(&e);
  }
  const std::size_t quota = (neither.size() + 4) / 5;  // ceil(0.2 * n)
  std::stable_sort(neither.begin(), neither.end(), [](const DatasetEntry* a, const DatasetEntry* b) {
    return CodePoints(a->sentence.text) > CodePoints(b->sentence.text);
  });
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < quota; ++i) ids.push_back(neither[i]->sentence.id);
  return ids;
}

LabelCounts CountLabels(std::span<const Label> labels) {
  LabelCounts c;
  for (Label l : labels) {
    switch (l) {
      case Label::kConsent: ++c.consent; break;
      case Label::kInstruction: ++c.instruction; break;
      case Label::kNeither: ++c.neither; break;
      case Label::kUnknown:
        throw Error(ErrorCode::kInput, "Unknown is not a dataset label");
    }
    ++c.total;
  }
  return c;
}

LabelCounts DatasetCounts(const std::vector<DatasetEntry>& dataset) {
  std::vector<Label> labels;
  std::size_t unresolved = 0;
  for (const DatasetEntry& e : dataset) {
    if (!IsFinal(e)) {
      ++unresolved;
      continue;
    }
    labels.push_back(*e.final_label());
  }
  if (unresolved > 0) {
    throw Error(ErrorCode::kInput, std::to_string(unresolved) +
                                       " sentence(s) still await review; reconcile first");
  }
  return CountLabels(labels);
}

std::string LabelCountsToJson(const LabelCounts& c) {
  ojson j;
  j["Consent"] = c.consent;
  j["Instruction"] = c.instruction;
  j["Neither"] = c.neither;
  j["total"] = c.total;
  return j.dump();
}

LabelCounts ParseLabelCountsJson(std::string_view json_text) {
  LabelCounts c;
  try {
    const json j = json::parse(json_text);
    c.consent = j.at("Consent").get<std::size_t>();
    c.instruction = j.at("Instruction").get<std::size_t>();
    c.neither = j.at("Neither").get<std::size_t>();
    c.total = j.at("total").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("label counts: ") + e.what());
  }
  if (c.consent + c.instruction + c.neither != c.total) {
    throw Error(ErrorCode::kInput, "label counts do not sum to the stated total");
  }
  return c;
}

std::optional<double> DatasetStats::human_agreement() const {
  if (human_checked == 0) return std::nullopt;
  return static_cast<double>(human_agreed) / static_cast<double>(human_checked);
}

DatasetStats ComputeDatasetStats(const std::vector<DatasetEntry>& dataset) {
  DatasetStats s;
  s.counts = DatasetCounts(dataset);
  if (!dataset.empty()) {
    std::vector<ConsensusOutcome> outcomes;
    for (const DatasetEntry& e : dataset) outcomes.push_back(e.consensus);
    s.disagreement_rate = DisagreementRate(outcomes);
  }
  for (const DatasetEntry& e : dataset) {
    for (const AnnotationRecord& r : e.annotations) s.anomalies += r.anomaly ? 1 : 0;
    const auto model = UnanimousLabel(e.consensus);
    if (e.human_label && model) {
      ++s.human_checked;
      if (*e.human_label == *model) ++s.human_agreed;
    }
  }
  return s;
}

std::string DatasetStatsToJson(const DatasetStats& s) {
  ojson j;
  j["counts"] = ojson::parse(LabelCountsToJson(s.counts));
  j["disagreement_rate"] = s.disagreement_rate;
  j["anomalies"] = s.anomalies;
  const auto agreement = s.human_agreement();
  j["human_vs_consensus"] = {
      {"scope", "human-reviewed rows whose model consensus was unanimous"},
      {"rows", s.human_checked},
      {"agreed", s.human_agreed},
      {"rate", agreement ? json(*agreement) : json(nullptr)}};
  return j.dump(2) + "\n";
}

std::string DatasetStatsText(const DatasetStats& s) {
  std::ostringstream ss;
  ss << "Consent      " << s.counts.consent << "\n"
     << "Instruction  " << s.counts.instruction << "\n"
     << "Neither      " << s.counts.neither << "\n"
     << "Total        " << s.counts.total << "\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "Inter-model disagreement rate  %.2f%%\n",
                100.0 * s.disagreement_rate);
  ss << buf;
  ss << "Anomalous model answers        " << s.anomalies << "\n";
  if (const auto a = s.human_agreement()) {
    std::snprintf(buf, sizeof(buf),
                  "Human vs model consensus       %.2f%% over %zu reviewed unanimous rows\n",
                  100.0 * *a, s.human_checked);
    ss << buf;
  } else {
    ss << "Human vs model consensus       n/a (no reviewed unanimous rows)\n";
  }
  return ss.str();
}

}  // namespace gb
