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

// Confusion matrices with an Unknown prediction column and support-weighted
// classification metrics.

#ifndef GESTUREBRIDGE_EVAL_HPP_
#define GESTUREBRIDGE_EVAL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gesturebridge/corpus.hpp"
#include "gesturebridge/gsd.hpp"

namespace gb {

// Rows are true labels (Consent, Instruction, Neither); columns add Unknown.
class ConfusionMatrix {
 public:
  static constexpr std::size_t kRows = 3;
  static constexpr std::size_t kCols = 4;

  // Throws kInput when `truth` is Unknown.
  void Add(Label truth, Label pred, std::int64_t n = 1);

  // Throws kInput on length mismatch or an Unknown truth.
  static ConfusionMatrix FromPairs(std::span<const Label> truths, std::span<const Label> preds);
  // Throws kInput on negative counts.
  static ConfusionMatrix FromRows(const std::array<std::array<std::int64_t, kCols>, kRows>& rows);

  std::int64_t at(Label truth, Label pred) const;
  std::int64_t row_sum(Label truth) const;
  std::int64_t col_sum(Label pred) const;
  std::int64_t total() const;
  std::int64_t trace() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::array<std::array<std::int64_t, kCols>, kRows> counts_{};
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
  bool precision_undefined = false;  // nothing predicted as this class
  bool recall_undefined = false;     // no true rows of this class
};

struct MetricsReport {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::array<ClassMetrics, 3> per_class{};  // Consent, Instruction, Neither
};

// Throws kInput for an empty matrix.
MetricsReport ComputeMetrics(const ConfusionMatrix& m);

struct EvalItem {
  std::string sentence_id;
  std::string text;
  Label truth = Label::kNeither;
};

// Finalized dataset rows as evaluation items. Throws kInput for rows that
// are not final.
std::vector<EvalItem> EvalItemsFromDataset(const std::vector<DatasetEntry>& dataset);

struct EvalLogEntry {
  std::string sentence_id;
  Label truth = Label::kNeither;
  Label pred = Label::kUnknown;
  std::string reasoning;
  std::string raw_response;
  std::string error;  // transport failure, pred unused
  ErrorCode error_code = ErrorCode::kInput;  // meaningful only with error
};

struct EvalResult {
  std::string model;
  ConfusionMatrix matrix;
  MetricsReport metrics;
  std::vector<EvalLogEntry> log;  // dataset order
  std::size_t failures = 0;
  bool valid = true;
};

// Failed items stay out of the matrix. More than 5% failures marks the
// result invalid; metrics are then computed over what succeeded, if any.
EvalResult EvaluateModel(const std::vector<EvalItem>& items, const Backend& backend,
                         const PromptTemplate& tmpl, std::string model, int concurrency = 4);

// Deterministic; carries no timings.
std::string EvalReportJson(const EvalResult& r);
std::string MetricsReportJson(const MetricsReport& m);
std::string EvalReportText(const EvalResult& r);
std::string ConfusionCsv(const ConfusionMatrix& m);
// Parses the CSV form back; rows keyed by true-label name.
ConfusionMatrix ParseConfusionCsv(std::string_view csv);
std::string EvalLogJsonl(const EvalResult& r);
// Heat-map rendering of the matrix.
std::string ConfusionSvg(const ConfusionMatrix& m, const std::string& title);

}  // namespace gb

#endif  // GESTUREBRIDGE_EVAL_HPP_
