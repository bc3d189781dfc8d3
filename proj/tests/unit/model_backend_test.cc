/*
 * Copyright 2026 The ctxkgc Authors.
 *
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

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ctxkgc/errors.h"
#include "ctxkgc/mock_models.h"
#include "ctxkgc/model.h"
#include "test_util.h"
#include "verbalizer_fixture.h"

namespace ctxkgc {
namespace {

using testing::GraphBuilder;

KnowledgeGraph SmallGraph() {
  GraphBuilder b;
  b.Train("a", "r", "b").Train("b", "r", "c");
  b.Mention("a", {"A"}).Mention("b", {"B", "Bee"}).Mention("c", {"C"});
  return b.Build();
}

CandidateOptions Samples(std::size_t n) {
  CandidateOptions o;
  o.samples = n;
  return o;
}

TEST(CandidatesTest, ConstantModel) {
  const KnowledgeGraph kg = SmallGraph();
  FixedOutputModel model({{"B", -0.5}});
  const CandidateSet set = GenerateCandidates(model, "query: A | r", kg, Samples(500));
  ASSERT_EQ(set.entries.size(), 1u);
  EXPECT_EQ(set.entries[0].entity, *kg.find_entity("b"));
  EXPECT_EQ(set.entries[0].logprob, -0.5);
  EXPECT_EQ(set.discarded_count, 0u);
}

TEST(CandidatesTest, AlternatingValidAndInvalid) {
  const KnowledgeGraph kg = SmallGraph();
  FixedOutputModel model({{"B", -0.5}, {"not-an-entity", -0.1}});
  const CandidateSet set = GenerateCandidates(model, "x", kg, Samples(500));
  ASSERT_EQ(set.entries.size(), 1u);
  EXPECT_EQ(set.discarded_count, 250u);
}

TEST(CandidatesTest, DuplicatesKeepTheMaximum) {
  const KnowledgeGraph kg = SmallGraph();
  FixedOutputModel model({{"B", -1.0}, {"bee", -0.3}, {" b ", -2.0}});
  const CandidateSet set = GenerateCandidates(model, "x", kg, Samples(3));
  ASSERT_EQ(set.entries.size(), 1u);
  EXPECT_EQ(set.entries[0].logprob, -0.3);
}

TEST(CandidatesTest, SortedByScoreThenEntity) {
  const KnowledgeGraph kg = SmallGraph();
  FixedOutputModel model({{"C", -1.0}, {"A", -1.0}, {"B", -0.2}});
  const CandidateSet set = GenerateCandidates(model, "x", kg, Samples(3));
  ASSERT_EQ(set.entries.size(), 3u);
  EXPECT_EQ(set.entries[0].entity, *kg.find_entity("b"));
  EXPECT_EQ(set.entries[1].entity, *kg.find_entity("a"));
  EXPECT_EQ(set.entries[2].entity, *kg.find_entity("c"));
  EXPECT_EQ(set.score_of(*kg.find_entity("a")), -1.0);
}

TEST(CandidatesTest, NegativeInfinityCountsAsDiscarded) {
  const KnowledgeGraph kg = SmallGraph();
  FixedOutputModel model({{"A", -std::numeric_limits<double>::infinity()}, {"B", -1.0}});
  const CandidateSet set = GenerateCandidates(model, "x", kg, Samples(4));
  EXPECT_EQ(set.entries.size(), 1u);
  EXPECT_EQ(set.discarded_count, 2u);
}

TEST(CandidatesTest, InvalidBackendOutputIsAProtocolError) {
  const KnowledgeGraph kg = SmallGraph();
  FixedOutputModel positive({{"A", 0.5}});
  EXPECT_THROW(GenerateCandidates(positive, "x", kg, Samples(2)), ProtocolError);
  FixedOutputModel nan({{"A", std::nan("")}});
  EXPECT_THROW(GenerateCandidates(nan, "x", kg, Samples(2)), ProtocolError);
  EXPECT_THROW(GenerateCandidates(positive, "x", kg, Samples(0)), ConfigError);
}

// Returns one sample fewer than requested.
class ShortModel final : public SequenceModel {
 public:
  std::vector<Sample> DrawSamples(std::string_view, std::size_t n, std::size_t,
                                  std::optional<std::uint64_t>) override {
    return std::vector<Sample>(n - 1, Sample{"A", -1.0});
  }
  std::vector<double> ScoreOutputs(std::string_view, std::span<const std::string> o) override {
    return std::vector<double>(o.size(), -1.0);
  }
  std::size_t CountTokens(std::string_view) override { return 1; }
  std::string name() const override { return "short"; }
};

TEST(CandidatesTest, WrongSampleCountIsAProtocolError) {
  const KnowledgeGraph kg = SmallGraph();
  ShortModel model;
  EXPECT_THROW(GenerateCandidates(model, "x", kg, Samples(5)), ProtocolError);
}

TEST(CandidatesTest, LengthNormalizationDividesByTokenCount) {
  GraphBuilder b;
  b.Train("a", "r", "b");
  b.Mention("a", {"one"}).Mention("b", {"two words here"});
  const KnowledgeGraph kg = b.Build();
  FixedOutputModel model({{"one", -1.0}, {"two words here", -1.5}});
  CandidateOptions o = Samples(2);
  EXPECT_EQ(GenerateCandidates(model, "x", kg, o).entries[0].entity, *kg.find_entity("a"));
  o.length_normalize = true;
  const CandidateSet set = GenerateCandidates(model, "x", kg, o);
  EXPECT_EQ(set.entries[0].entity, *kg.find_entity("b"));
  EXPECT_DOUBLE_EQ(set.entries[0].logprob, -0.5);
}

TEST(CandidatesTest, SizeAndDiscardAccounting) {
  testing::TempDir dir;
  const KnowledgeGraph kg = testing::SyntheticGraph(SyntheticSpec{}, dir.path());
  std::vector<Sample> cycle;
  for (int i = 0; i < 40; ++i) {
    cycle.push_back({i % 3 == 0 ? "junk " + std::to_string(i)
                                : std::string(kg.entity_mention(EntityId{static_cast<std::uint32_t>(i)})),
                     -0.1 * i});
  }
  FixedOutputModel model(cycle);
  const CandidateSet set = GenerateCandidates(model, "x", kg, Samples(40));
  EXPECT_LE(set.entries.size(), 40u);
  EXPECT_EQ(set.entries.size() + set.discarded_count, 40u);
  for (const Candidate& c : set.entries) EXPECT_TRUE(std::isfinite(c.logprob));
}

TEST(NeighborCopyModelTest, RanksByContextFrequency) {
  const testing::VerbalizerFixture fx;
  MockNeighborCopyModel model(fx.kg());
  // Babymetal three times, AKB48 once, heavy metal three times, J-pop once.
  ContextBundle bundle;
  bundle.relation_context = {fx.Context(fx.E("Q6"), fx.E("Q7")), fx.Context(fx.E("Q6"), fx.E("Q7")),
                             fx.Context(fx.E("Q6"), fx.E("Q7")), fx.Context(fx.E("Q5"), fx.E("Q2"))};
  const std::string input =
      Verbalize(fx.kg(), Query{fx.E("Q1"), fx.R("P136"), std::nullopt}, bundle, {}).text;
  const auto counts = model.ContextCounts(input);
  EXPECT_EQ(counts.at(fx.E("Q6")), 3u);
  EXPECT_EQ(counts.at(fx.E("Q5")), 1u);
  CandidateOptions o = Samples(200);
  o.seed = 5;
  const CandidateSet set = GenerateCandidates(model, input, fx.kg(), o);
  const double x = *set.score_of(fx.E("Q6"));
  const double y = *set.score_of(fx.E("Q5"));
  EXPECT_GT(x, y);
  EXPECT_DOUBLE_EQ(x, std::log(3.0 / 8.0));
  EXPECT_DOUBLE_EQ(y, std::log(1.0 / 8.0));
  // Sample frequencies follow the same order.
  std::map<std::string, int> freq;
  for (const Sample& s : model.DrawSamples(input, 2000, 64, 9)) ++freq[s.text];
  EXPECT_GT(freq["Babymetal"], 2 * freq["AKB48"]);
  const std::vector<std::string> outputs = {"Babymetal", "AKB48", "StylipS", "nobody"};
  const auto scores = model.ScoreOutputs(input, outputs);
  EXPECT_DOUBLE_EQ(scores[0], std::log(3.0 / 8.0));
  EXPECT_DOUBLE_EQ(scores[1], std::log(1.0 / 8.0));
  EXPECT_TRUE(std::isinf(scores[2]));
  EXPECT_TRUE(std::isinf(scores[3]));
}

TEST(NeighborCopyModelTest, EmptyContextIsUniformAndDeterministic) {
  const testing::VerbalizerFixture fx;
  MockNeighborCopyModel model(fx.kg());
  const auto a = model.DrawSamples("query: StylipS | genre", 700, 64, 3);
  const auto b = model.DrawSamples("query: StylipS | genre", 700, 64, 3);
  EXPECT_EQ(a, b);
  std::map<std::string, int> freq;
  for (const Sample& s : a) {
    EXPECT_DOUBLE_EQ(s.logprob, -std::log(7.0));
    ++freq[s.text];
  }
  EXPECT_EQ(freq.size(), 7u);
  for (const auto& [text, n] : freq) EXPECT_GT(n, 50) << text;
}

TEST(OracleModelTest, EmitsKnownAnswers) {
  const testing::VerbalizerFixture fx;
  GoldOracleModel model(fx.kg());
  const CandidateSet set =
      GenerateCandidates(model, "query: J-pop | reverse of genre <SEP> x", fx.kg(), Samples(4));
  ASSERT_EQ(set.entries.size(), 2u);
  EXPECT_TRUE(set.score_of(fx.E("Q1")).has_value());
  EXPECT_TRUE(set.score_of(fx.E("Q5")).has_value());
}

TEST(SplitSegmentsTest, TrimsAndKeepsEmpty) {
  const auto s = SplitSegments("a <SEP>  b <SEP>", "<SEP>");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], "a");
  EXPECT_EQ(s[1], "b");
  EXPECT_EQ(s[2], "");
}

}  // namespace
}  // namespace ctxkgc
