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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <benchmark/benchmark.h>

#include "ctxkgc/evaluator.h"
#include "ctxkgc/knowledge_graph.h"
#include "ctxkgc/random.h"
#include "ctxkgc/selector.h"
#include "ctxkgc/synthetic.h"
#include "ctxkgc/verbalizer.h"

namespace ctxkgc {
namespace {

// One dense graph shared by the selector and verbalizer benchmarks.
GraphData BenchGraph() {
  SyntheticSpec spec;
  spec.entities = 2000;
  spec.relations = 40;
  spec.train = 40000;
  spec.valid = 2000;
  spec.test = 2000;
  const SyntheticDataset d = GenerateSynthetic(spec);
  GraphData data;
  std::unordered_map<std::string, EntityId> entities;
  std::unordered_map<std::string, std::uint32_t> relations;
  for (const auto& [key, mentions] : d.entity_mentions) {
    entities.emplace(key, EntityId{static_cast<std::uint32_t>(data.entities.size())});
    data.entities.push_back(EntityRecord{key, mentions, std::nullopt});
  }
  for (const auto& [key, mention] : d.relation_mentions) {
    relations.emplace(key, static_cast<std::uint32_t>(data.relations.size()));
    data.relations.push_back(RelationRecord{key, mention});
  }
  for (int s = 0; s < 3; ++s) {
    for (const auto& [h, r, t] : d.splits[s]) {
      data.splits[s].push_back(
          Triple{entities.at(h), RelationId::Base(relations.at(r)), entities.at(t)});
    }
  }
  return data;
}

const KnowledgeGraph& Graph() {
  static const KnowledgeGraph kg(BenchGraph());
  return kg;
}

std::vector<Query> Queries() {
  return DirectedQueries(Graph(), Split::kTest);
}

void BM_FilteredRank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<Candidate> candidates;
  std::vector<EntityId> filter;
  for (std::uint32_t e = 0; e < n; ++e) {
    candidates.push_back(Candidate{EntityId{e}, -static_cast<double>(rng() % 50) / 4});
    if (e % 7 == 0) filter.push_back(EntityId{e});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(FilteredRank(candidates, EntityId{3}, filter));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FilteredRank)->Arg(50)->Arg(500)->Arg(5000);

void BM_EntityNeighborhood(benchmark::State& state) {
  const auto queries = Queries();
  SelectorConfig config;
  config.neighborhood_cap = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        SampleEntityNeighborhood(Graph(), queries[i++ % queries.size()], config, rng));
  }
}
BENCHMARK(BM_EntityNeighborhood)->Arg(10)->Arg(50);

void BM_RelationContext(benchmark::State& state) {
  const auto queries = Queries();
  SelectorConfig config;
  config.relation_cap = static_cast<std::size_t>(state.range(0));
  config.strategy = static_cast<SamplingStrategy>(state.range(1));
  Rng rng(3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        SampleRelationContext(Graph(), queries[i++ % queries.size()], config, rng));
  }
}
BENCHMARK(BM_RelationContext)
    ->Args({50, static_cast<int>(SamplingStrategy::kCustomized)})
    ->Args({50, static_cast<int>(SamplingStrategy::kRandom)})
    ->Args({200, static_cast<int>(SamplingStrategy::kCustomized)});

void BM_Verbalize(benchmark::State& state) {
  const auto queries = Queries();
  SelectorConfig config;
  Rng rng(4);
  std::vector<ContextBundle> bundles;
  for (std::size_t i = 0; i < 256; ++i) {
    bundles.push_back(SelectContext(Graph(), queries[i % queries.size()], config, rng));
  }
  VerbalizerOptions options;
  options.budget = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t k = i++ % bundles.size();
    benchmark::DoNotOptimize(Verbalize(Graph(), queries[k % queries.size()], bundles[k], options));
  }
}
BENCHMARK(BM_Verbalize)->Arg(512)->Arg(64);

}  // namespace
}  // namespace ctxkgc

BENCHMARK_MAIN();
