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

#include "gesturebridge/eval.hpp"

#include <glog/logging.h>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "gesturebridge/file_io.hpp"
#include "json.hpp"

namespace gb {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<Label, 4> kAllLabels = {Label::kConsent, Label::kInstruction,
                                             Label::kNeither, Label::kUnknown};

std::size_t Idx(Label l) { return static_cast<std::size_t>(l); }

void RequireTruth(Label l) {
  if (!IsTrueLabel(l)) throw Error(ErrorCode::kInput, "Unknown cannot be a true label");
}

double Ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string Fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void ConfusionMatrix::Add(Label truth, Label pred, std::int64_t n) {
  RequireTruth(truth);
  if (n < 0) throw Error(ErrorCode::kInput, "negative confusion count");
  counts_[Idx(truth)][Idx(pred)] += n;
}

ConfusionMatrix ConfusionMatrix::FromPairs(std::span<const Label> truths,
                                           std::span<const Label> preds) {
  if (truths.size() != preds.size()) {
    throw Error(ErrorCode::kInput, "truths and predictions differ in length (" +
                                       std::to_string(truths.size()) + " vs " +
                                       std::to_string(preds.size()) + ")");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < truths.size(); ++i) m.Add(truths[i], preds[i]);
  return m;
}

ConfusionMatrix ConfusionMatrix::FromRows(
    const std::array<std::array<std::int64_t, kCols>, kRows>& rows) {
  ConfusionMatrix m;
  for (std::size_t r = 0; r < kRows; ++r) {
    for (std::size_t c = 0; c < kCols; ++c) m.Add(kTrueLabels[r], kAllLabels[c], rows[r][c]);
  }
  return m;
}

std::int64_t ConfusionMatrix::at(Label truth, Label pred) const {
  RequireTruth(truth);
  return counts_[Idx(truth)][Idx(pred)];
}

std::int64_t ConfusionMatrix::row_sum(Label truth) const {
  RequireTruth(truth);
  std::int64_t s = 0;
  for (std::int64_t v : counts_[Idx(truth)]) s += v;
  return s;
}

std::int64_t ConfusionMatrix::col_sum(Label pred) const {
  std::int64_t s = 0;
  for (const auto& row : counts_) s += row[Idx(pred)];
  return s;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t s = 0;
  for (Label t : kTrueLabels) s += row_sum(t);
  return s;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t s = 0;
  for (Label t : kTrueLabels) s += counts_[Idx(t)][Idx(t)];
  return s;
}

MetricsReport ComputeMetrics(const ConfusionMatrix& m) {
  const std::int64_t total = m.total();
  if (total == 0) throw Error(ErrorCode::kInput, "metrics of an empty confusion matrix");
  MetricsReport r;
  r.accuracy = Ratio(m.trace(), total);
  for (Label l : kTrueLabels) {
    ClassMetrics& c = r.per_class[Idx(l)];
    const std::int64_t tp = m.at(l, l);
    const std::int64_t col = m.col_sum(l);
    c.support = m.row_sum(l);
    c.precision_undefined = col == 0;
    c.recall_undefined = c.support == 0;
    c.precision = Ratio(tp, col);
    c.recall = Ratio(tp, c.support);
    const double denom = c.precision + c.recall;
    c.f1 = denom == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / denom;
    const double w = static_cast<double>(c.support) / static_cast<double>(total);
    r.weighted_precision += w * c.precision;
    r.weighted_recall += w * c.recall;
    r.weighted_f1 += w * c.f1;
  }
  return r;
}

std::vector<EvalItem> EvalItemsFromDataset(const std::vector<DatasetEntry>& dataset) {
  std::vector<EvalItem> items;
  items.reserve(dataset.size());
  for (const DatasetEntry& e : dataset) {
    const auto label = e.final_label();
    if (!label || e.consensus.needs_review) {
      throw Error(ErrorCode::kInput, "dataset row " + e.sentence.id + " is not finalized");
    }
    items.push_back({e.sentence.id, e.sentence.text, *label});
  }
  return items;
}

EvalResult EvaluateModel(const std::vector<EvalItem>& items, const Backend& backend,
                         const PromptTemplate& tmpl, std::string model, int concurrency) {
  if (items.empty()) throw Error(ErrorCode::kInput, "evaluation dataset is empty");
  std::vector<ClassifyRequest> requests;
  requests.reserve(items.size());
  for (const EvalItem& item : items) {
    RequireTruth(item.truth);
    requests.push_back({item.sentence_id, item.text});
  }
  const std::vector<ClassifyOutcome> outcomes = ClassifyAll(requests, backend, tmpl, concurrency);

  EvalResult r;
  r.model = std::move(model);
  for (std::size_t i = 0; i < items.size(); ++i) {
    EvalLogEntry entry;
    entry.sentence_id = items[i].sentence_id;
    entry.truth = items[i].truth;
    if (outcomes[i].result) {
      entry.pred = outcomes[i].result->label;
      entry.reasoning = outcomes[i].result->reasoning;
      entry.raw_response = outcomes[i].result->raw_response;
      r.matrix.Add(entry.truth, entry.pred);
    } else {
      entry.error = outcomes[i].error;
      entry.error_code = outcomes[i].error_code;
      ++r.failures;
    }
    r.log.push_back(std::move(entry));
  }
  // More than 5% of items failed in transport.
  if (r.failures * 20 > items.size()) {
    r.valid = false;
    LOG(ERROR) << r.failures << " of " << items.size()
               << " classifications failed; report marked invalid";
  }
  if (r.matrix.total() > 0) r.metrics = ComputeMetrics(r.matrix);
  return r;
}

std::string MetricsReportJson(const MetricsReport& m) {
  ojson j;
  j["accuracy"] = m.accuracy;
  j["weighted_precision"] = m.weighted_precision;
  j["weighted_recall"] = m.weighted_recall;
  j["weighted_f1"] = m.weighted_f1;
  ojson per = ojson::object();
  for (Label l : kTrueLabels) {
    const ClassMetrics& c = m.per_class[Idx(l)];
    per[std::string(LabelName(l))] = {{"precision", c.precision},
                                      {"recall", c.recall},
                                      {"f1", c.f1},
                                      {"support", c.support},
                                      {"precision_undefined", c.precision_undefined},
                                      {"recall_undefined", c.recall_undefined}};
  }
  j["per_class"] = std::move(per);
  return j.dump(2);
}

std::string EvalReportJson(const EvalResult& r) {
  ojson j;
  j["model"] = r.model;
  j["valid"] = r.valid;
  j["items"] = r.log.size();
  j["failures"] = r.failures;
  ojson matrix = ojson::object();
  for (Label t : kTrueLabels) {
    ojson row = ojson::object();
    for (Label p : kAllLabels) row[std::string(LabelName(p))] = r.matrix.at(t, p);
    matrix[std::string(LabelName(t))] = std::move(row);
  }
  j["confusion"] = std::move(matrix);
  if (r.matrix.total() > 0) {
    j["metrics"] = ojson::parse(MetricsReportJson(r.metrics));
  } else {
    j["metrics"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string EvalReportText(const EvalResult& r) {
  std::ostringstream ss;
  ss << "model: " << r.model << (r.valid ? "" : "  [INVALID: too many transport failures]")
     << "\n";
  ss << "items: " << r.log.size() << "  failures: " << r.failures << "\n\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12s %8s %12s %8s %8s\n", "true\\pred", "Consent",
                "Instruction", "Neither", "Unknown");
  ss << buf;
  for (Label t : kTrueLabels) {
    std::snprintf(buf, sizeof(buf), "%-12s %8lld %12lld %8lld %8lld\n",
                  std::string(LabelName(t)).c_str(),
                  static_cast<long long>(r.matrix.at(t, Label::kConsent)),
                  static_cast<long long>(r.matrix.at(t, Label::kInstruction)),
                  static_cast<long long>(r.matrix.at(t, Label::kNeither)),
                  static_cast<long long>(r.matrix.at(t, Label::kUnknown)));
    ss << buf;
  }
  if (r.matrix.total() == 0) return ss.str();
  const MetricsReport& m = r.metrics;
  ss << "\n";
  std::snprintf(buf, sizeof(buf), "%-12s %9s %9s %9s %8s\n", "class", "precision", "recall",
                "f1", "support");
  ss << buf;
  for (Label l : kTrueLabels) {
    const ClassMetrics& c = m.per_class[Idx(l)];
    std::snprintf(buf, sizeof(buf), "%-12s %9.4f %9.4f %9.4f %8lld\n",
                  std::string(LabelName(l)).c_str(), c.precision, c.recall, c.f1,
                  static_cast<long long>(c.support));
    ss << buf;
  }
  ss << "\naccuracy            " << Fixed(m.accuracy, 4) << "\n";
  ss << "weighted precision  " << Fixed(m.weighted_precision, 4) << "\n";
  ss << "weighted recall     " << Fixed(m.weighted_recall, 4) << "\n";
  ss << "weighted f1         " << Fixed(m.weighted_f1, 4) << "\n";
  return ss.str();
}

std::string ConfusionCsv(const ConfusionMatrix& m) {
  std::string out = "true,Consent,Instruction,Neither,Unknown\n";
  for (Label t : kTrueLabels) {
    out += LabelName(t);
    for (Label p : kAllLabels) out += "," + std::to_string(m.at(t, p));
    out += "\n";
  }
  return out;
}

ConfusionMatrix ParseConfusionCsv(std::string_view csv) {
  ConfusionMatrix m;
  const auto lines = SplitLines(csv);
  bool header = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = Trim(lines[i]);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss{std::string(line)};
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) {
      throw ParseError("confusion CSV row needs 5 cells", static_cast<int>(i) + 1);
    }
    const auto truth = ParseLabel(cells[0]);
    if (!truth || !IsTrueLabel(*truth)) {
      throw ParseError("bad true label '" + cells[0] + "'", static_cast<int>(i) + 1);
    }
    for (std::size_t c = 0; c < 4; ++c) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(cells[c + 1], &used);
        if (used != cells[c + 1].size() || v < 0) throw std::invalid_argument("count");
        m.Add(*truth, kAllLabels[c], v);
      } catch (const std::logic_error&) {
        throw ParseError("bad count '" + cells[c + 1] + "'", static_cast<int>(i) + 1);
      }
    }
  }
  return m;
}

std::string EvalLogJsonl(const EvalResult& r) {
  std::string out;
  for (const EvalLogEntry& e : r.log) {
    ojson j;
    j["sentence_id"] = e.sentence_id;
    j["truth"] = LabelName(e.truth);
    if (e.error.empty()) {
      j["pred"] = LabelName(e.pred);
      j["correct"] = e.truth == e.pred;
      j["reasoning"] = e.reasoning;
      j["raw_response"] = e.raw_response;
    } else {
      j["pred"] = nullptr;
      j["error"] = e.error;
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::string ConfusionSvg(const ConfusionMatrix& m, const std::string& title) {
  constexpr int kCell = 90, kLeft = 110, kTop = 70;
  std::int64_t peak = 1;
  for (Label t : kTrueLabels) {
    for (Label p : kAllLabels) peak = std::max(peak, m.at(t, p));
  }
  const int width = kLeft + 4 * kCell + 20;
  const int height = kTop + 3 * kCell + 50;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << title << "</text>\n";
  for (std::size_t c = 0; c < 4; ++c) {
    s << "<text x=\"" << kLeft + static_cast<int>(c) * kCell + kCell / 2 << "\" y=\"" << kTop - 8
      << "\" text-anchor=\"middle\">" << LabelName(kAllLabels[c]) << "</text>\n";
  }
  for (std::size_t r = 0; r < 3; ++r) {
    const int y = kTop + static_cast<int>(r) * kCell;
    s << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + kCell / 2 + 4
      << "\" text-anchor=\"end\">" << LabelName(kTrueLabels[r]) << "</text>\n";
    for (std::size_t c = 0; c < 4; ++c) {
      const std::int64_t v = m.at(kTrueLabels[r], kAllLabels[c]);
      const double f = static_cast<double>(v) / static_cast<double>(peak);
      const int shade = static_cast<int>(255.0 - 200.0 * f);
      const int x = kLeft + static_cast<int>(c) * kCell;
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
        << kCell << "\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"#444\"/>\n";
      s << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 5
        << "\" text-anchor=\"middle\" fill=\"" << (f > 0.6 ? "white" : "black") << "\">" << v
        << "</text>\n";
    }
  }
  s << "<text x=\"" << kLeft + 2 * kCell << "\" y=\"" << height - 15
    << "\" text-anchor=\"middle\">predicted</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace gb
