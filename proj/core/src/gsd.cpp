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

#include "gesturebridge/gsd.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>

#include "gesturebridge/file_io.hpp"
#include "gesturebridge/parallel.hpp"
#include "json.hpp"

namespace gb {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Markdown and list decoration a model may wrap around a field name.
constexpr std::string_view kDecoration = " \t*#->`_";

std::string_view StripLeading(std::string_view s, std::string_view chars) {
  const auto b = s.find_first_not_of(chars);
  return b == std::string_view::npos ? std::string_view{} : s.substr(b);
}

std::string_view StripBoth(std::string_view s, std::string_view chars) {
  s = StripLeading(s, chars);
  const auto e = s.find_last_not_of(chars);
  return e == std::string_view::npos ? std::string_view{} : s.substr(0, e + 1);
}

// If `line` is "<field>:" possibly wrapped in decoration, returns the text
// after the colon.
std::optional<std::string_view> FieldValue(std::string_view line, std::string_view field) {
  std::string_view s = StripLeading(line, kDecoration);
  if (s.size() < field.size() || Lower(s.substr(0, field.size())) != field) return std::nullopt;
  s = StripLeading(s.substr(field.size()), " \t*_`");
  if (s.empty() || s.front() != ':') return std::nullopt;
  return StripBoth(s.substr(1), " \t*_`");
}

// Removes <think>/<thinking> blocks; an unterminated block runs to the end,
// and text before an orphan closing tag is treated as deliberation.
std::string StripThinking(std::string_view raw) {
  std::string text(raw);
  for (;;) {
    const std::string lower = Lower(text);
    const auto open = lower.find("<think");
    if (open == std::string::npos) break;
    const auto close = lower.find("</think", open);
    if (close == std::string::npos) {
      text.erase(open);
      break;
    }
    const auto gt = lower.find('>', close);
    text.erase(open, (gt == std::string::npos ? lower.size() : gt + 1) - open);
  }
  const std::string lower = Lower(text);
  const auto orphan = lower.rfind("</think");
  if (orphan != std::string::npos) {
    const auto gt = lower.find('>', orphan);
    text.erase(0, gt == std::string::npos ? lower.size() : gt + 1);
  }
  return text;
}

std::string OneLine(std::string_view s) {
  std::string out(Trim(s));
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

}  // namespace

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kConsent: return "Consent";
    case Label::kInstruction: return "Instruction";
    case Label::kNeither: return "Neither";
    case Label::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view LabelToken(Label label) {
  switch (label) {
    case Label::kConsent: return "CONSENT";
    case Label::kInstruction: return "INSTRUCTION";
    case Label::kNeither: return "NEITHER";
    case Label::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<Label> ParseLabel(std::string_view text) {
  const std::string l = Lower(Trim(text));
  if (l == "consent") return Label::kConsent;
  if (l == "instruction") return Label::kInstruction;
  if (l == "neither") return Label::kNeither;
  if (l == "unknown") return Label::kUnknown;
  return std::nullopt;
}

Label ParseTrueLabel(std::string_view text) {
  const auto label = ParseLabel(text);
  if (!label || !IsTrueLabel(*label)) {
    throw Error(ErrorCode::kInput, "not a true label: '" + std::string(text) + "'");
  }
  return *label;
}

bool GestureTrigger(Label label) {
  return label == Label::kConsent || label == Label::kInstruction;
}

void PromptTemplate::Validate() const {
  int instruction = 0, consent = 0, neither = 0;
  for (const Exemplar& e : exemplars) {
    switch (e.label) {
      case Label::kInstruction: ++instruction; break;
      case Label::kConsent: ++consent; break;
      case Label::kNeither: ++neither; break;
      case Label::kUnknown:
        throw Error(ErrorCode::kConfig, "exemplar labeled Unknown: " + e.sentence);
    }
    if (Trim(e.sentence).empty()) throw Error(ErrorCode::kConfig, "exemplar with empty sentence");
  }
  if (instruction != counts.instruction || consent != counts.consent ||
      neither != counts.neither) {
    throw Error(ErrorCode::kConfig,
                "exemplar counts (instruction " + std::to_string(instruction) + ", consent " +
                    std::to_string(consent) + ", neither " + std::to_string(neither) +
                    ") do not match the configured counts");
  }
  for (std::string_view token : {"INSTRUCTION", "CONSENT", "NEITHER"}) {
    if (output_format.find(token) == std::string::npos) {
      throw Error(ErrorCode::kConfig,
                  "output format lacks the literal token " + std::string(token));
    }
  }
}

PromptTemplate ParsePromptTemplate(std::string_view yaml_text) {
  PromptTemplate t;
  try {
    const YAML::Node root = YAML::Load(std::string(yaml_text));
    if (!root.IsMap()) throw Error(ErrorCode::kConfig, "prompt template: expected a mapping");
    t.header = root["header"].as<std::string>();
    t.output_format = root["output_format"].as<std::string>();
    if (const YAML::Node c = root["counts"]) {
      if (c["instruction"]) t.counts.instruction = c["instruction"].as<int>();
      if (c["consent"]) t.counts.consent = c["consent"].as<int>();
      if (c["neither"]) t.counts.neither = c["neither"].as<int>();
    }
    for (const YAML::Node& e : root["exemplars"]) {
      Exemplar ex;
      ex.sentence = e["sentence"].as<std::string>();
      const auto label = ParseLabel(e["label"].as<std::string>());
      if (!label || !IsTrueLabel(*label)) {
        throw Error(ErrorCode::kConfig, "exemplar has invalid label: " + ex.sentence);
      }
      ex.label = *label;
      ex.reasoning = e["reasoning"] ? e["reasoning"].as<std::string>() : "";
      ex.origin = e["origin"] ? e["origin"].as<std::string>() : "";
      t.exemplars.push_back(std::move(ex));
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, std::string("prompt template: ") + e.what());
  }
  t.Validate();
  return t;
}

PromptTemplate LoadPromptTemplate(const std::string& path) {
  return ParsePromptTemplate(ReadFile(path));
}

std::string BuildPrompt(const PromptTemplate& tmpl, std::string_view sentence) {
  const std::string query = OneLine(sentence);
  if (query.empty()) throw Error(ErrorCode::kInput, "cannot classify an empty sentence");

  std::string p(Trim(tmpl.header));
  p += "\n\nRespond in exactly this format:\n";
  for (std::string_view line : SplitLines(Trim(tmpl.output_format))) {
    p += "    ";
    p += line;
    p += '\n';
  }
  p += "\nExamples:\n";
  for (const Exemplar& e : tmpl.exemplars) {
    p += "\nSentence: \"" + OneLine(e.sentence) + "\"\n";
    p += "Classification: " + std::string(LabelToken(e.label)) + "\n";
    p += "Reasoning: " + OneLine(e.reasoning) + "\n";
  }
  p += "\nNow classify the following sentence.\n\n";
  p += "Sentence: \"" + query + "\"\n";
  p += "Classification:";
  return p;
}

std::size_t EstimatePromptTokens(std::string_view prompt) {
  std::size_t words = 0;
  bool in_word = false;
  for (char c : prompt) {
    const bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!ws && !in_word) ++words;
    in_word = !ws;
  }
  return static_cast<std::size_t>(std::ceil(static_cast<double>(words) * 1.5));
}

ParsedResponse ParseResponse(std::string_view raw) {
  const std::string text = StripThinking(raw);
  const auto lines = SplitLines(text);
  ParsedResponse out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto value = FieldValue(lines[i], "classification");
    if (!value) continue;
    std::string_view v = *value;
    std::size_t next = i + 1;
    // "Classification:" alone on its line, answer on the next one.
    if (v.empty()) {
      while (next < lines.size() && Trim(lines[next]).empty()) ++next;
      if (next < lines.size()) v = StripBoth(lines[next++], kDecoration);
    }
    const std::string_view word =
        StripBoth(v.substr(0, v.find_first_of(" \t")), "[](){}\"'*`.,;:!_");
    const auto label = ParseLabel(word);
    out.label = label.value_or(Label::kUnknown);
    for (std::size_t k = next; k < lines.size(); ++k) {
      if (const auto r = FieldValue(lines[k], "reasoning")) {
        out.reasoning = std::string(*r);
        break;
      }
    }
    break;  // first statement wins
  }
  return out;
}

std::string RenderResponse(Label label, std::string_view reasoning) {
  return "Classification: " + std::string(LabelToken(label)) + "\nReasoning: " +
         OneLine(reasoning);
}

ClassificationResult Classify(std::string_view sentence_id, std::string_view sentence,
                              const Backend& backend, const PromptTemplate& tmpl) {
  const std::string prompt = BuildPrompt(tmpl, sentence);
  const auto t0 = std::chrono::steady_clock::now();
  std::string raw = backend.Complete(prompt);
  const auto t1 = std::chrono::steady_clock::now();
  ParsedResponse parsed = ParseResponse(raw);
  ClassificationResult r;
  r.sentence_id = std::string(sentence_id);
  r.label = parsed.label;
  r.reasoning = std::move(parsed.reasoning);
  r.raw_response = std::move(raw);
  r.latency_s = std::chrono::duration<double>(t1 - t0).count();
  return r;
}

std::vector<ClassifyOutcome> ClassifyAll(const std::vector<ClassifyRequest>& requests,
                                         const Backend& backend, const PromptTemplate& tmpl,
                                         int concurrency) {
  std::vector<ClassifyOutcome> outcomes(requests.size());
  BoundedParallelFor(requests.size(), concurrency, [&](std::size_t i) {
    try {
      outcomes[i].result =
          Classify(requests[i].sentence_id, requests[i].text, backend, tmpl);
    } catch (const Error& e) {
      outcomes[i].error = e.what();
      outcomes[i].error_code = e.code();
    }
  });
  return outcomes;
}

std::string ClassificationToJson(const ClassificationResult& r, bool include_latency) {
  nlohmann::ordered_json j;
  j["sentence_id"] = r.sentence_id;
  j["label"] = LabelName(r.label);
  j["reasoning"] = r.reasoning;
  if (include_latency) j["latency_s"] = r.latency_s;
  return j.dump();
}

}  // namespace gb
