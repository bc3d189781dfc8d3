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

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ctxkgc/errors.h"
#include "ctxkgc/ingest.h"
#include "ctxkgc/knowledge_graph.h"
#include "ctxkgc/snapshot.h"
#include "test_util.h"

namespace ctxkgc {
namespace {

using testing::GraphBuilder;
using testing::TempDir;
using testing::WriteFile;

DatasetPaths WriteSplits(const TempDir& dir, const std::string& train,
                         const std::string& valid = "", const std::string& test = "") {
  WriteFile(dir / "train.txt", train);
  WriteFile(dir / "valid.txt", valid);
  WriteFile(dir / "test.txt", test);
  return DatasetPaths{dir / "train.txt", dir / "valid.txt", dir / "test.txt", {}, {}, {}};
}

TEST(RelationIdTest, ReciprocalIsAnInvolution) {
  for (std::uint32_t b = 0; b < 50; ++b) {
    const RelationId r = RelationId::Base(b);
    EXPECT_FALSE(r.is_reciprocal());
    EXPECT_TRUE(r.reciprocal().is_reciprocal());
    EXPECT_EQ(r.reciprocal().reciprocal(), r);
    EXPECT_EQ(r.reciprocal().base(), b);
    EXPECT_NE(r.reciprocal(), RelationId::Base(b + 1));
  }
}

TEST(IngestTest, MinimalGraph) {
  TempDir dir;
  IngestReport report;
  const KnowledgeGraph kg = Ingest(WriteSplits(dir, "a\tr\tb\n"), {}, &report);
  EXPECT_EQ(kg.entity_count(), 2u);
  EXPECT_EQ(kg.relation_count(), 1u);
  EXPECT_EQ(kg.split(Split::kTrain).size(), 1u);
  EXPECT_EQ(kg.split(Split::kValid).size(), 0u);
  EXPECT_EQ(kg.split(Split::kTest).size(), 0u);
  EXPECT_EQ(report.triples, (std::array<std::size_t, 3>{1, 0, 0}));
}

TEST(IngestTest, DuplicateLinesAreDroppedAndCounted) {
  const std::vector<std::string> lines = {
      "a\tr\tb", "a\tr\tc", "b\tr\tc", "c\ts\ta", "a\tr\tb", "d\ts\ta",
      "e\tr\td", "e\ts\tb", "b\ts\te", "c\ts\ta", "d\tr\te", "e\tr\ta",
  };
  ASSERT_EQ(lines.size(), 12u);
  // Reference count of distinct lines, independent of the interner.
  const std::set<std::string> distinct(lines.begin(), lines.end());
  ASSERT_EQ(distinct.size(), 10u);

  std::string text;
  for (const auto& l : lines) text += l + "\n";
  TempDir dir;
  IngestReport report;
  const KnowledgeGraph kg = Ingest(WriteSplits(dir, text), {}, &report);
  EXPECT_EQ(kg.split(Split::kTrain).size(), distinct.size());
  EXPECT_EQ(report.duplicates[0], lines.size() - distinct.size());
}

TEST(IngestTest, IdsOnlyInTestAreInterned) {
  TempDir dir;
  const KnowledgeGraph kg = Ingest(WriteSplits(dir, "a\tr\tb\n", "", "x\tq\ty\n"));
  EXPECT_EQ(kg.entity_count(), 4u);
  EXPECT_EQ(kg.relation_count(), 2u);
  EXPECT_TRUE(kg.find_entity("x").has_value());
  EXPECT_TRUE(kg.neighbors(*kg.find_entity("x")).empty());
}

TEST(IngestTest, MalformedLineReportsLineNumber) {
  TempDir dir;
  try {
    Ingest(WriteSplits(dir, "a\tr\tb\nc\tr\n"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(IngestTest, EmptyTrainIsAnError) {
  TempDir dir;
  EXPECT_THROW(Ingest(WriteSplits(dir, "")), DataError);
}

TEST(IngestTest, MissingMentionsAreListed) {
  TempDir dir;
  DatasetPaths paths = WriteSplits(dir, "a\tr\tb\nc\tr\ta\n");
  WriteFile(dir / "ent.txt", "a\tAlpha\n");
  paths.entity_mentions = dir / "ent.txt";
  try {
    Ingest(paths);
    FAIL() << "expected MissingMentionError";
  } catch (const MissingMentionError& e) {
    EXPECT_EQ(e.ids(), (std::vector<std::string>{"b", "c"}));
  }
}

TEST(IngestTest, MentionsAliasesAndDescriptions) {
  TempDir dir;
  DatasetPaths paths = WriteSplits(dir, "Q1\tP1\tQ2\n");
  WriteFile(dir / "ent.txt", "Q1\tStylipS\tStylips band\nQ2\t  heavy   metal \n");
  WriteFile(dir / "rel.txt", "P1\tgenre\n");
  WriteFile(dir / "desc.txt", "Q1\tJapanese idol group\n");
  paths.entity_mentions = dir / "ent.txt";
  paths.relation_mentions = dir / "rel.txt";
  paths.descriptions = dir / "desc.txt";
  const KnowledgeGraph kg = Ingest(paths);
  const EntityId q1 = *kg.find_entity("Q1");
  const EntityId q2 = *kg.find_entity("Q2");
  const RelationId p1 = *kg.find_relation("P1");
  EXPECT_EQ(kg.entity_mention(q1), "StylipS");
  EXPECT_EQ(kg.entity_mention(q2), "heavy metal");
  EXPECT_EQ(kg.relation_mention(p1), "genre");
  EXPECT_EQ(kg.relation_mention(p1.reciprocal()), "reverse of genre");
  EXPECT_EQ(kg.description(q1), std::optional<std::string_view>("Japanese idol group"));
  EXPECT_FALSE(kg.description(q2).has_value());
  EXPECT_EQ(kg.match_entity("stylips  BAND"), q1);
  EXPECT_EQ(kg.match_entity("Heavy Metal"), q2);
  EXPECT_FALSE(kg.match_entity("not an entity").has_value());
}

TEST(IngestTest, ReciprocalPrefixIsConfigurable) {
  TempDir dir;
  IngestOptions options;
  options.reciprocal_prefix = "inverse ";
  const KnowledgeGraph kg = Ingest(WriteSplits(dir, "a\tr\tb\n"), options);
  EXPECT_EQ(kg.relation_mention(RelationId::Base(0).reciprocal()), "inverse r");
}

TEST(IngestTest, MentionRoundTripsForEveryEntity) {
  TempDir dir;
  SyntheticSpec spec;
  const KnowledgeGraph kg = testing::SyntheticGraph(spec, dir.path());
  for (std::uint32_t e = 0; e < kg.entity_count(); ++e) {
    EXPECT_EQ(kg.match_entity(kg.entity_mention(EntityId{e})), EntityId{e});
    for (const auto& alias : kg.entity_aliases(EntityId{e})) {
      EXPECT_EQ(kg.match_entity(alias), EntityId{e}) << alias;
    }
  }
}

TEST(IngestTest, IdempotentSnapshots) {
  TempDir dir;
  SyntheticSpec spec;
  spec.descriptions = true;
  const DatasetPaths paths = WriteDataset(GenerateSynthetic(spec), dir.path());
  const std::string a = SerializeGraph(Ingest(paths).data());
  const std::string b = SerializeGraph(Ingest(paths).data());
  EXPECT_EQ(a, b);
  EXPECT_EQ(Fingerprint(a), Fingerprint(b));
}

TEST(KnowledgeGraphTest, DirectedQueries) {
  GraphBuilder b;
  b.Add(Split::kTest, "a", "r", "b");
  b.Train("a", "r", "c");
  const KnowledgeGraph kg = b.Build();
  const auto queries = DirectedQueries(kg, Split::kTest);
  ASSERT_EQ(queries.size(), 2u);
  const EntityId a = *kg.find_entity("a");
  const EntityId bb = *kg.find_entity("b");
  const RelationId r = *kg.find_relation("r");
  EXPECT_EQ(queries[0].source, a);
  EXPECT_EQ(queries[0].relation, r);
  EXPECT_EQ(queries[0].gold, bb);
  EXPECT_EQ(queries[1].source, bb);
  EXPECT_EQ(queries[1].relation, r.reciprocal());
  EXPECT_EQ(queries[1].gold, a);
}

TEST(KnowledgeGraphTest, FilterSetAndNeighborsOnTinyGraph) {
  GraphBuilder b;
  b.Train("a", "r", "b").Train("a", "r", "c");
  b.Entity("lonely");
  const KnowledgeGraph kg = b.Build();
  const EntityId a = *kg.find_entity("a");
  const EntityId bb = *kg.find_entity("b");
  const EntityId c = *kg.find_entity("c");
  const RelationId r = *kg.find_relation("r");
  EXPECT_EQ(kg.filter_set(a, r), (std::vector<EntityId>{bb, c}));
  EXPECT_EQ(kg.filter_set(bb, r.reciprocal()), (std::vector<EntityId>{a}));
  const auto na = kg.neighbors(a);
  EXPECT_EQ(std::vector<Neighbor>(na.begin(), na.end()),
            (std::vector<Neighbor>{{r, bb}, {r, c}}));
  const auto nb = kg.neighbors(bb);
  EXPECT_EQ(std::vector<Neighbor>(nb.begin(), nb.end()),
            (std::vector<Neighbor>{{r.reciprocal(), a}}));
  EXPECT_TRUE(kg.neighbors(*kg.find_entity("lonely")).empty());
}

// Brute-force scans over the raw split vectors.
std::vector<EntityId> ScanFilter(const GraphData& d, EntityId source, RelationId r) {
  std::set<EntityId> out;
  for (const auto& split : d.splits) {
    for (const Triple& t : split) {
      if (t.relation.base() != r.base()) continue;
      if (!r.is_reciprocal() && t.head == source) out.insert(t.tail);
      if (r.is_reciprocal() && t.tail == source) out.insert(t.head);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<Neighbor> ScanNeighbors(const GraphData& d, EntityId e) {
  std::vector<Neighbor> out;
  for (const Triple& t : d.split(Split::kTrain)) {
    if (t.head == e) out.push_back({t.relation, t.tail});
    if (t.tail == e) out.push_back({t.relation.reciprocal(), t.head});
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& x, const Neighbor& y) {
    return std::pair(x.relation.index(), x.entity.value) <
           std::pair(y.relation.index(), y.entity.value);
  });
  return out;
}

class RandomGraphTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomGraphTest, IndexesMatchBruteForce) {
  const GraphData data = testing::RandomGraphData(GetParam(), 20, 4, 50);
  const KnowledgeGraph kg(data);
  for (std::uint32_t e = 0; e < kg.entity_count(); ++e) {
    const EntityId id{e};
    const auto n = kg.neighbors(id);
    EXPECT_EQ(std::vector<Neighbor>(n.begin(), n.end()), ScanNeighbors(data, id));
    for (std::uint32_t r = 0; r < 2 * kg.relation_count(); ++r) {
      const RelationId rel = RelationId::FromIndex(r);
      EXPECT_EQ(kg.filter_set(id, rel), ScanFilter(data, id, rel));
    }
  }
}

TEST_P(RandomGraphTest, FilterSetContainsGoldOfEveryQuery) {
  const KnowledgeGraph kg(testing::RandomGraphData(GetParam(), 20, 4, 50));
  for (Split s : kAllSplits) {
    const auto queries = DirectedQueries(kg, s);
    EXPECT_EQ(queries.size(), 2 * kg.split(s).size());
    for (const Query& q : queries) {
      const auto f = kg.filter_set(q.source, q.relation);
      EXPECT_TRUE(std::binary_search(f.begin(), f.end(), *q.gold));
      EXPECT_TRUE(kg.is_known(q.source, q.relation, *q.gold));
      EXPECT_EQ(kg.in_train(q.source, q.relation, *q.gold), s == Split::kTrain);
    }
  }
}

TEST_P(RandomGraphTest, RebuildingIndexesIsIdentical) {
  const GraphData data = testing::RandomGraphData(GetParam(), 20, 4, 50);
  const KnowledgeGraph a(data);
  const KnowledgeGraph b(DeserializeGraph(SerializeGraph(a.data())));
  EXPECT_EQ(a.data(), b.data());
  for (std::uint32_t e = 0; e < a.entity_count(); ++e) {
    const auto na = a.neighbors(EntityId{e});
    const auto nb = b.neighbors(EntityId{e});
    EXPECT_TRUE(std::equal(na.begin(), na.end(), nb.begin(), nb.end()));
  }
  for (std::uint32_t r = 0; r < 2 * a.relation_count(); ++r) {
    const RelationId rel = RelationId::FromIndex(r);
    EXPECT_EQ(a.facet(rel, true), b.facet(rel, true));
    EXPECT_EQ(a.facet(rel, false), b.facet(rel, false));
    const auto ta = a.relation_triples(rel);
    const auto tb = b.relation_triples(rel);
    EXPECT_TRUE(std::equal(ta.begin(), ta.end(), tb.begin(), tb.end()));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomGraphTest, ::testing::Values(1, 2, 3, 4, 5));

TEST(SnapshotTest, RoundTripThroughFile) {
  TempDir dir;
  SyntheticSpec spec;
  spec.descriptions = true;
  const KnowledgeGraph kg = testing::SyntheticGraph(spec, dir.path());
  WriteSnapshot(kg, dir / "g.snapshot");
  const KnowledgeGraph back = ReadSnapshot(dir / "g.snapshot");
  EXPECT_EQ(kg.data(), back.data());
}

TEST(SnapshotTest, RejectsGarbageAndTruncation) {
  EXPECT_THROW(DeserializeGraph("not a snapshot"), DataError);
  GraphBuilder b;
  b.Train("a", "r", "b");
  const std::string bytes = SerializeGraph(b.data());
  for (std::size_t n : {std::size_t{0}, std::size_t{8}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(DeserializeGraph(std::string_view(bytes).substr(0, n)), DataError) << n;
  }
}

}  // namespace
}  // namespace ctxkgc
