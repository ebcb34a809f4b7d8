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

#include <gtest/gtest.h>

#include "gesturebridge/gsd.hpp"
#include "test_support.hpp"

namespace gb {
namespace {

using nlohmann::json;

std::size_t CountLinesStartingWith(const std::string& text, std::string_view prefix) {
  std::size_t n = 0;
  for (std::string_view line : SplitLines(text)) n += line.substr(0, prefix.size()) == prefix;
  return n;
}

// Always fails at the transport level.
class DownBackend : public Backend {
 public:
  std::string Complete(std::string_view) const override {
    throw Error(ErrorCode::kConnectionRefused, "down");
  }
  const std::string& name() const override { return name_; }

 private:
  std::string name_ = "down";
};

TEST(LabelTest, NamesAndParsing) {
  EXPECT_EQ(LabelName(Label::kConsent), "Consent");
  EXPECT_EQ(LabelToken(Label::kInstruction), "INSTRUCTION");
  EXPECT_EQ(ParseLabel("neither"), Label::kNeither);
  EXPECT_EQ(ParseLabel("UNKNOWN"), Label::kUnknown);
  EXPECT_FALSE(ParseLabel("maybe").has_value());
  EXPECT_THROW(ParseTrueLabel("Unknown"), Error);
  EXPECT_EQ(ParseTrueLabel("Consent"), Label::kConsent);
}

TEST(LabelTest, GestureTrigger) {
  EXPECT_TRUE(GestureTrigger(Label::kConsent));
  EXPECT_TRUE(GestureTrigger(Label::kInstruction));
  EXPECT_FALSE(GestureTrigger(Label::kNeither));
  EXPECT_FALSE(GestureTrigger(Label::kUnknown));
}

TEST(TemplateTest, BundledTemplateHasElevenExemplars) {
  const PromptTemplate t = test::DefaultTemplate();
  ASSERT_EQ(t.exemplars.size(), 11u);
  int counts[3] = {0, 0, 0};
  for (const Exemplar& e : t.exemplars) ++counts[static_cast<int>(e.label)];
  EXPECT_EQ(counts[0], 4);
  EXPECT_EQ(counts[1], 4);
  EXPECT_EQ(counts[2], 3);
}

TEST(TemplateTest, ValidationRejectsWrongCounts) {
  PromptTemplate t = test::DefaultTemplate();
  t.exemplars.pop_back();
  EXPECT_THROW(t.Validate(), Error);
  t = test::DefaultTemplate();
  t.output_format = "Classification: [YES/NO]";
  EXPECT_THROW(t.Validate(), Error);
  EXPECT_THROW(ParsePromptTemplate("header: x\n"), Error);
}

TEST(PromptTest, StructureAndDeterminism) {
  const PromptTemplate t = test::DefaultTemplate();
  const std::string s = "Could you turn your head to the left?";
  const std::string p = BuildPrompt(t, s);
  EXPECT_EQ(CountLinesStartingWith(p, "Classification:"), 12u);
  EXPECT_EQ(CountLinesStartingWith(p, "Sentence: "), 12u);
  EXPECT_NE(p.find("Sentence: \"" + s + "\""), std::string::npos);
  EXPECT_EQ(p.substr(p.size() - std::string("Classification:").size()), "Classification:");
  EXPECT_EQ(BuildPrompt(t, s), p);
  EXPECT_EQ(PromptFingerprint(BuildPrompt(t, s)), PromptFingerprint(p));
  EXPECT_LT(EstimatePromptTokens(p), 10000u);
  // Surrounding whitespace is normalized away; any other change is not.
  EXPECT_EQ(BuildPrompt(t, "  " + s + "\n"), p);
  EXPECT_NE(BuildPrompt(t, s + "!"), p);
  EXPECT_THROW(BuildPrompt(t, "   "), Error);
}

TEST(PromptTest, TokenEstimate) {
  EXPECT_EQ(EstimatePromptTokens(""), 0u);
  EXPECT_EQ(EstimatePromptTokens("one"), 2u);
  EXPECT_EQ(EstimatePromptTokens("one two\nthree  four"), 6u);
}

TEST(ParseResponseTest, AdversarialCorpusMatchesHandLabels) {
  int rows = 0;
  const std::string corpus = ReadFile(test::FixturePath("gsd/adversarial_responses.jsonl"));
  for (std::string_view line : SplitLines(corpus)) {
    if (Trim(line).empty()) continue;
    const json j = json::parse(line);
    const ParsedResponse r = ParseResponse(j.at("raw").get<std::string>());
    EXPECT_EQ(LabelName(r.label), j.at("label").get<std::string>()) << j.at("raw");
    EXPECT_EQ(r.reasoning, j.at("reasoning").get<std::string>()) << j.at("raw");
    ++rows;
  }
  EXPECT_EQ(rows, 30);
}

TEST(ParseResponseTest, RenderReadsBackUnchanged) {
  for (Label l : kTrueLabels) {
    for (std::string reasoning : {"short", "two\nlines", "", "  padded  "}) {
      const std::string rendered = RenderResponse(l, reasoning);
      const ParsedResponse p = ParseResponse(rendered);
      EXPECT_EQ(p.label, l);
      EXPECT_EQ(RenderResponse(p.label, p.reasoning), rendered);
    }
  }
}

TEST(ClassifyTest, UsesFixtureForTheBuiltPrompt) {
  const PromptTemplate t = test::DefaultTemplate();
  const auto fixtures = test::FixturesFromResponses(
      test::FixturePath("gsd/route_responses.jsonl"), t);
  const MockBackend mock("mock", fixtures);
  const ClassificationResult r =
      Classify("u1", "Please raise both arms in front of you.", mock, t);
  EXPECT_EQ(r.label, Label::kInstruction);
  EXPECT_EQ(r.reasoning, "asks for an arm movement");
  EXPECT_EQ(r.sentence_id, "u1");
  EXPECT_EQ(Classify("u2", "The weather has been terrible this week.", mock, t).label,
            Label::kNeither);
  EXPECT_EQ(Classify("u3", "May I examine your shoulder?", mock, t).label, Label::kConsent);
  EXPECT_THROW(Classify("u4", "Unseen sentence.", mock, t), Error);
}

TEST(ClassifyTest, ClassifyAllKeepsOrderAndReportsFailures) {
  const PromptTemplate t = test::DefaultTemplate();
  const auto fixtures = test::FixturesFromResponses(
      test::FixturePath("gsd/route_responses.jsonl"), t);
  const MockBackend mock("mock", fixtures);
  std::vector<ClassifyRequest> reqs = {{"a", "May I examine your shoulder?"},
                                       {"b", "Unseen sentence."},
                                       {"c", "Please raise both arms in front of you."}};
  for (int conc : {1, 2, 8}) {
    const auto out = ClassifyAll(reqs, mock, t, conc);
    ASSERT_EQ(out.size(), 3u);
    ASSERT_TRUE(out[0].result.has_value());
    EXPECT_EQ(out[0].result->label, Label::kConsent);
    EXPECT_FALSE(out[1].result.has_value());
    EXPECT_EQ(out[1].error_code, ErrorCode::kMissingFixture);
    EXPECT_EQ(out[2].result->sentence_id, "c");
  }
  const auto down = ClassifyAll(reqs, DownBackend(), t, 2);
  for (const ClassifyOutcome& o : down) EXPECT_EQ(o.error_code, ErrorCode::kConnectionRefused);
}

TEST(ClassifyTest, JsonOmitsLatencyOnRequest) {
  ClassificationResult r;
  r.sentence_id = "s";
  r.label = Label::kNeither;
  r.reasoning = "x";
  r.latency_s = 0.25;
  EXPECT_EQ(ClassificationToJson(r, false),
            "{\"sentence_id\":\"s\",\"label\":\"Neither\",\"reasoning\":\"x\"}");
  EXPECT_NE(ClassificationToJson(r, true).find("latency_s"), std::string::npos);
}

}  // namespace
}  // namespace gb
