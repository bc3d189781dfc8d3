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

#ifndef CTXKGC_SELECTOR_H_
#define CTXKGC_SELECTOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ctxkgc/ids.h"
#include "ctxkgc/knowledge_graph.h"
#include "ctxkgc/random.h"

namespace ctxkgc {

enum class CardinalityClass : std::uint8_t {
  kOneToOne,
  kOneToMany,
  kManyToOne,
  kManyToMany,
};

std::string_view CardinalityName(CardinalityClass c);  // "1-1", "1-n", ...
CardinalityClass Transpose(CardinalityClass c);

enum class SamplingStrategy : std::uint8_t {
  kCustomized,
  kRandom,             // relation context ignores cardinality
  kNoRelationContext,  // relation context is never sampled
};

std::string_view StrategyName(SamplingStrategy s);
std::optional<SamplingStrategy> ParseStrategy(std::string_view name);

struct SelectorConfig {
  std::size_t neighborhood_cap = 50;
  std::size_t relation_cap = 50;
  SamplingStrategy strategy = SamplingStrategy::kCustomized;
  // Mean tails-per-head / heads-per-tail above this count as "many".
  double cardinality_threshold = 1.5;
  std::uint64_t seed = 0;

  // Throws ConfigError when the threshold is not positive.
  void Validate() const;

  bool operator==(const SelectorConfig&) const = default;
};

struct CardinalityStats {
  std::size_t triples = 0;
  std::size_t distinct_heads = 0;
  std::size_t distinct_tails = 0;

  double tails_per_head() const;
  double heads_per_tail() const;
};

// Train-split statistics of the relation read in its own direction, so a
// reciprocal relation has heads and tails swapped.
CardinalityStats RelationStats(const KnowledgeGraph& kg, RelationId relation);

// Classifies a directed relation. Throws DataError when the base relation has
// no train triples.
CardinalityClass ClassifyCardinality(const KnowledgeGraph& kg,
                                     RelationId relation, double threshold);

// Entity neighborhood: group the source's neighbors by relation, order
// groups by size (descending, then relation id), then take one random unused
// pair per group per round until the cap or exhaustion. The pair forming the
// target triple is never returned. Output is in selection order.
std::vector<Neighbor> SampleEntityNeighborhood(const KnowledgeGraph& kg,
                                               const Query& query,
                                               const SelectorConfig& config,
                                               Rng& rng);

// Relation context: train triples of the query's base relation, chosen by
// the directed relation's cardinality class (or uniformly under kRandom).
// Triples are returned in stored (base) form, in selection order.
std::vector<Triple> SampleRelationContext(const KnowledgeGraph& kg,
                                          const Query& query,
                                          const SelectorConfig& config,
                                          Rng& rng);

struct NeighborhoodItem {
  RelationId relation;
  EntityId entity;
  std::string_view relation_mention;
  std::string_view entity_mention;
};

// A relation-context triple read in the query's direction: for a reciprocal
// query (t, r^-1, ?) the stored triple (h, r, t') reads as (t', h).
struct RelationContextItem {
  Triple triple;
  EntityId head;
  EntityId tail;
  std::string_view head_mention;
  std::string_view tail_mention;
};

// Mentions point into the graph, which must outlive the bundle.
struct ContextBundle {
  std::vector<NeighborhoodItem> neighborhood;
  std::vector<RelationContextItem> relation_context;
};

ContextBundle SelectContext(const KnowledgeGraph& kg, const Query& query,
                            const SelectorConfig& config, Rng& rng);

// True when the bundle contains the query's target triple in either
// direction.
bool BundleLeaksTarget(const Query& query, const ContextBundle& bundle);

}  // namespace ctxkgc

#endif  // CTXKGC_SELECTOR_H_
