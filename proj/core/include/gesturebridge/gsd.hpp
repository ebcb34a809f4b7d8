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

// Gesture sentence detection: few-shot prompt construction, response
// parsing and the gesture trigger that routes a sentence to the mimic or
// generated-motion path.

#ifndef GESTUREBRIDGE_GSD_HPP_
#define GESTUREBRIDGE_GSD_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gesturebridge/error.hpp"
#include "gesturebridge/llm.hpp"

namespace gb {

// Unknown only ever appears as a prediction.
enum class Label { kConsent = 0, kInstruction = 1, kNeither = 2, kUnknown = 3 };

inline constexpr std::array<Label, 3> kTrueLabels = {Label::kConsent, Label::kInstruction,
                                                     Label::kNeither};

std::string_view LabelName(Label label);   // "Consent"
std::string_view LabelToken(Label label);  // "CONSENT"
// Case-insensitive; accepts the four label names.
std::optional<Label> ParseLabel(std::string_view text);
// Like ParseLabel but rejects Unknown; throws kInput.
Label ParseTrueLabel(std::string_view text);
inline bool IsTrueLabel(Label l) { return l != Label::kUnknown; }

// Consent and Instruction actuate the mimic path. Neither and Unknown do not.
bool GestureTrigger(Label label);

struct Exemplar {
  std::string sentence;
  Label label = Label::kNeither;
  std::string reasoning;
  std::string origin;  // "curated" or "handcrafted"
};

struct ExemplarCounts {
  int instruction = 4;
  int consent = 4;
  int neither = 3;
};

struct PromptTemplate {
  std::string header;
  std::vector<Exemplar> exemplars;
  std::string output_format;
  ExemplarCounts counts;

  // Throws kConfig if exemplar class counts differ from `counts` or the
  // output format lacks any of INSTRUCTION, CONSENT, NEITHER.
  void Validate() const;
};

// Template files are YAML with header, output_format, exemplars and an
// optional counts block; see docs/formats.md.
PromptTemplate ParsePromptTemplate(std::string_view yaml_text);
PromptTemplate LoadPromptTemplate(const std::string& path);

// Header, the indented output format, every exemplar rendered as
//   Sentence: "..."
//   Classification: LABEL
//   Reasoning: ...
// and finally the query sentence with an empty Classification slot.
// Throws kInput when the sentence is blank.
std::string BuildPrompt(const PromptTemplate& tmpl, std::string_view sentence);

// Whitespace token count times 1.5, rounded up.
std::size_t EstimatePromptTokens(std::string_view prompt);

struct ParsedResponse {
  Label label = Label::kUnknown;
  std::string reasoning;
};

// Total. Drops <think>...</think> blocks, then reads the first
// "Classification:" line (case-insensitive, markdown emphasis tolerated).
// Anything other than the three category tokens yields Unknown.
ParsedResponse ParseResponse(std::string_view raw);

// The two-line form ParseResponse reads back unchanged.
std::string RenderResponse(Label label, std::string_view reasoning);

struct ClassificationResult {
  std::string sentence_id;
  Label label = Label::kUnknown;
  std::string reasoning;
  std::string raw_response;
  double latency_s = 0.0;
};

// BuildPrompt -> Complete -> ParseResponse. Model misbehaviour maps to
// Unknown; transport errors propagate.
ClassificationResult Classify(std::string_view sentence_id, std::string_view sentence,
                              const Backend& backend, const PromptTemplate& tmpl);

struct ClassifyRequest {
  std::string sentence_id;
  std::string text;
};

struct ClassifyOutcome {
  std::optional<ClassificationResult> result;
  std::string error;  // set when result is empty
  ErrorCode error_code = ErrorCode::kInput;
};

// Classifies every request with at most `concurrency` calls in flight.
// Outcome i corresponds to request i.
std::vector<ClassifyOutcome> ClassifyAll(const std::vector<ClassifyRequest>& requests,
                                         const Backend& backend, const PromptTemplate& tmpl,
                                         int concurrency = 4);

// {"sentence_id", "label", "reasoning", "latency_s"}; latency is omitted
// when include_latency is false so mock runs are byte-reproducible.
std::string ClassificationToJson(const ClassificationResult& r, bool include_latency = true);

}  // namespace gb

#endif  // GESTUREBRIDGE_GSD_HPP_
