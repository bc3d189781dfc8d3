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

#include "ctxkgc/knowledge_graph.h"

#include <algorithm>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "ctxkgc/errors.h"
#include "ctxkgc/text.h"

namespace ctxkgc {

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "?";
}

std::optional<Split> ParseSplit(std::string_view name) {
  for (Split s : kAllSplits) {
    if (SplitName(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<std::size_t> RelationFacet::find(EntityId key) const {
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys.begin());
}

std::size_t RelationFacet::group_of(std::size_t position) const {
  const auto it = std::upper_bound(offsets.begin(), offsets.end(),
                                   static_cast<std::uint32_t>(position));
  return static_cast<std::size_t>(it - offsets.begin()) - 1;
}

namespace {

// CSR adjacency over the given splits, both directions, deduplicated and
// sorted by (relation index, entity) within each entity.
void BuildAdjacency(std::size_t entity_count,
                    std::initializer_list<const std::vector<Triple>*> splits,
                    std::vector<std::uint32_t>& offsets,
                    std::vector<Neighbor>& items) {
  std::vector<std::uint32_t> degree(entity_count + 1, 0);
  std::size_t total = 0;
  for (const auto* triples : splits) {
    for (const Triple& t : *triples) {
      ++degree[t.head.value + 1];
      ++degree[t.tail.value + 1];
    }
    total += 2 * triples->size();
  }
  if (total > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("graph too large for 32-bit adjacency offsets");
  }
  for (std::size_t e = 0; e < entity_count; ++e) degree[e + 1] += degree[e];
  items.assign(total, Neighbor{});
  std::vector<std::uint32_t> cursor(degree.begin(), degree.end() - 1);
  for (const auto* triples : splits) {
    for (const Triple& t : *triples) {
      items[cursor[t.head.value]++] = Neighbor{t.relation, t.tail};
      items[cursor[t.tail.value]++] = Neighbor{t.relation.reciprocal(), t.head};
    }
  }
  offsets.assign(entity_count + 1, 0);
  std::size_t write = 0;
  for (std::size_t e = 0; e < entity_count; ++e) {
    auto first = items.begin() + degree[e];
    auto last = items.begin() + degree[e + 1];
    std::sort(first, last);
    last = std::unique(first, last);
    offsets[e] = static_cast<std::uint32_t>(write);
    write = static_cast<std::size_t>(
        std::move(first, last, items.begin() + write) - items.begin());
  }
  offsets[entity_count] = static_cast<std::uint32_t>(write);
  items.resize(write);
}

RelationFacet BuildFacet(std::vector<std::pair<EntityId, EntityId>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  RelationFacet facet;
  facet.members.reserve(pairs.size());
  for (const auto& [key, member] : pairs) {
    if (facet.keys.empty() || facet.keys.back() != key) {
      if (!facet.keys.empty()) {
        facet.offsets.push_back(static_cast<std::uint32_t>(facet.members.size()));
      }
      facet.keys.push_back(key);
    }
    facet.members.push_back(member);
  }
  if (!facet.keys.empty()) {
    facet.offsets.push_back(static_cast<std::uint32_t>(facet.members.size()));
  }
  return facet;
}

std::span<const Neighbor> RelationRange(std::span<const Neighbor> range,
                                        RelationId r) {
  const auto by_relation = [](const Neighbor& n, RelationId rel) {
    return n.relation < rel;
  };
  const auto first =
      std::lower_bound(range.begin(), range.end(), r, by_relation);
  auto last = first;
  while (last != range.end() && last->relation == r) ++last;
  return {first, last};
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(GraphData data) : data_(std::move(data)) {
  BuildIndexes();
}

void KnowledgeGraph::BuildIndexes() {
  const std::size_t n_entities = data_.entities.size();
  const std::size_t n_relations = data_.relations.size();

  for (Split s : kAllSplits) {
    for (const Triple& t : data_.split(s)) {
      if (t.head.value >= n_entities || t.tail.value >= n_entities ||
          t.relation.base() >= n_relations || t.relation.is_reciprocal()) {
        throw DataError(fmt::format("{} split holds a triple with invalid ids",
                                    SplitName(s)));
      }
    }
  }

  entity_by_key_.reserve(n_entities);
  for (std::uint32_t e = 0; e < n_entities; ++e) {
    const EntityRecord& rec = data_.entities[e];
    if (rec.mentions.empty() || NormalizeWhitespace(rec.mentions.front()).empty()) {
      throw DataError(fmt::format("entity '{}' has an empty mention", rec.key));
    }
    if (!entity_by_key_.emplace(rec.key, EntityId{e}).second) {
      throw DataError(fmt::format("entity key '{}' interned twice", rec.key));
    }
  }
  // Canonical mentions take precedence over aliases; lower ids win ties.
  for (std::uint32_t e = 0; e < n_entities; ++e) {
    entity_by_mention_.try_emplace(MatchKey(data_.entities[e].mentions.front()),
                                   EntityId{e});
  }
  for (std::uint32_t e = 0; e < n_entities; ++e) {
    const auto& mentions = data_.entities[e].mentions;
    for (std::size_t i = 1; i < mentions.size(); ++i) {
      entity_by_mention_.try_emplace(MatchKey(mentions[i]), EntityId{e});
    }
  }

  directed_mentions_.resize(2 * n_relations);
  for (std::uint32_t r = 0; r < n_relations; ++r) {
    const RelationRecord& rec = data_.relations[r];
    if (NormalizeWhitespace(rec.mention).empty()) {
      throw DataError(fmt::format("relation '{}' has an empty mention", rec.key));
    }
    if (!relation_by_key_.emplace(rec.key, r).second) {
      throw DataError(fmt::format("relation key '{}' interned twice", rec.key));
    }
    directed_mentions_[2 * r] = rec.mention;
    directed_mentions_[2 * r + 1] = data_.reciprocal_prefix + rec.mention;
  }
  for (std::uint32_t i = 0; i < directed_mentions_.size(); ++i) {
    relation_by_mention_.try_emplace(MatchKey(directed_mentions_[i]),
                                     RelationId::FromIndex(i));
  }

  const auto& train = data_.split(Split::kTrain);
  BuildAdjacency(n_entities, {&train}, neighbor_offsets_, neighbors_);
  BuildAdjacency(n_entities,
                 {&train, &data_.split(Split::kValid), &data_.split(Split::kTest)},
                 known_offsets_, known_);

  relation_offsets_.assign(n_relations + 1, 0);
  for (const Triple& t : train) ++relation_offsets_[t.relation.base() + 1];
  for (std::size_t r = 0; r < n_relations; ++r) {
    relation_offsets_[r + 1] += relation_offsets_[r];
  }
  relation_triples_.resize(train.size());
  {
    std::vector<std::uint32_t> cursor(relation_offsets_.begin(),
                                      relation_offsets_.end() - 1);
    for (const Triple& t : train) relation_triples_[cursor[t.relation.base()]++] = t;
  }

  by_head_.resize(n_relations);
  by_tail_.resize(n_relations);
  for (std::uint32_t r = 0; r < n_relations; ++r) {
    const auto triples = relation_triples(RelationId::Base(r));
    std::vector<std::pair<EntityId, EntityId>> heads;
    std::vector<std::pair<EntityId, EntityId>> tails;
    heads.reserve(triples.size());
    tails.reserve(triples.size());
    for (const Triple& t : triples) {
      heads.emplace_back(t.head, t.tail);
      tails.emplace_back(t.tail, t.head);
    }
    by_head_[r] = BuildFacet(std::move(heads));
    by_tail_[r] = BuildFacet(std::move(tails));
  }
}

std::string_view KnowledgeGraph::entity_key(EntityId e) const {
  return data_.entities.at(e.value).key;
}

std::string_view KnowledgeGraph::relation_key(RelationId r) const {
  return data_.relations.at(r.base()).key;
}

std::string_view KnowledgeGraph::entity_mention(EntityId e) const {
  return data_.entities.at(e.value).mentions.front();
}

std::span<const std::string> KnowledgeGraph::entity_aliases(EntityId e) const {
  return data_.entities.at(e.value).mentions;
}

std::string_view KnowledgeGraph::relation_mention(RelationId r) const {
  return directed_mentions_.at(r.index());
}

std::optional<std::string_view> KnowledgeGraph::description(EntityId e) const {
  const auto& d = data_.entities.at(e.value).description;
  if (!d) return std::nullopt;
  return std::string_view(*d);
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view key) const {
  const auto it = entity_by_key_.find(std::string(key));
  if (it == entity_by_key_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view key) const {
  const auto it = relation_by_key_.find(std::string(key));
  if (it == relation_by_key_.end()) return std::nullopt;
  return RelationId::Base(it->second);
}

std::optional<EntityId> KnowledgeGraph::match_entity(std::string_view text) const {
  const auto it = entity_by_mention_.find(MatchKey(text));
  if (it == entity_by_mention_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::match_relation(std::string_view text) const {
  const auto it = relation_by_mention_.find(MatchKey(text));
  if (it == relation_by_mention_.end()) return std::nullopt;
  return it->second;
}

std::span<const Neighbor> KnowledgeGraph::neighbors(EntityId e) const {
  const auto first = neighbor_offsets_.at(e.value);
  const auto last = neighbor_offsets_.at(e.value + 1);
  return {neighbors_.data() + first, neighbors_.data() + last};
}

std::span<const Neighbor> KnowledgeGraph::out_edges(EntityId source,
                                                    RelationId r) const {
  return RelationRange(neighbors(source), r);
}

std::span<const Triple> KnowledgeGraph::relation_triples(RelationId r) const {
  const auto first = relation_offsets_.at(r.base());
  const auto last = relation_offsets_.at(r.base() + 1);
  return {relation_triples_.data() + first, relation_triples_.data() + last};
}

const RelationFacet& KnowledgeGraph::facet(RelationId r,
                                           bool by_directed_head) const {
  const bool by_stored_head = by_directed_head != r.is_reciprocal();
  return by_stored_head ? by_head_.at(r.base()) : by_tail_.at(r.base());
}

std::vector<EntityId> KnowledgeGraph::filter_set(EntityId source,
                                                 RelationId r) const {
  const auto first = known_offsets_.at(source.value);
  const auto last = known_offsets_.at(source.value + 1);
  const auto range =
      RelationRange({known_.data() + first, known_.data() + last}, r);
  std::vector<EntityId> out;
  out.reserve(range.size());
  for (const Neighbor& n : range) out.push_back(n.entity);
  return out;
}

bool KnowledgeGraph::is_known(EntityId source, RelationId r,
                              EntityId target) const {
  const auto first = known_.begin() + known_offsets_.at(source.value);
  const auto last = known_.begin() + known_offsets_.at(source.value + 1);
  return std::binary_search(first, last, Neighbor{r, target});
}

bool KnowledgeGraph::in_train(EntityId source, RelationId r,
                              EntityId target) const {
  const auto range = neighbors(source);
  return std::binary_search(range.begin(), range.end(), Neighbor{r, target});
}

std::vector<Query> DirectedQueries(const KnowledgeGraph& kg, Split split) {
  const auto triples = kg.split(split);
  std::vector<Query> queries;
  queries.reserve(2 * triples.size());
  for (const Triple& t : triples) {
    queries.push_back(Query{t.head, t.relation, t.tail});
    queries.push_back(Query{t.tail, t.relation.reciprocal(), t.head});
  }
  return queries;
}

}  // namespace ctxkgc
