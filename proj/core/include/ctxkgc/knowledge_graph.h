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

#ifndef CTXKGC_KNOWLEDGE_GRAPH_H_
#define CTXKGC_KNOWLEDGE_GRAPH_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctxkgc/ids.h"

namespace ctxkgc {

inline constexpr std::string_view kDefaultReciprocalPrefix = "reverse of ";

struct EntityRecord {
  std::string key;  // raw id from the dataset files
  // First entry is the canonical mention; the rest are aliases.
  std::vector<std::string> mentions;
  std::optional<std::string> description;

  bool operator==(const EntityRecord&) const = default;
};

struct RelationRecord {
  std::string key;
  std::string mention;

  bool operator==(const RelationRecord&) const = default;
};

// Interned tables and split sets; everything a KnowledgeGraph is built from
// and everything a snapshot stores.
struct GraphData {
  std::vector<EntityRecord> entities;
  std::vector<RelationRecord> relations;
  std::string reciprocal_prefix{kDefaultReciprocalPrefix};
  std::array<std::vector<Triple>, 3> splits;

  std::vector<Triple>& split(Split s) { return splits[static_cast<int>(s)]; }
  const std::vector<Triple>& split(Split s) const {
    return splits[static_cast<int>(s)];
  }

  bool operator==(const GraphData&) const = default;
};

// A (relation, entity) pair adjacent to some entity. Incoming edges appear
// under the reciprocal relation.
struct Neighbor {
  RelationId relation;
  EntityId entity;

  constexpr auto operator<=>(const Neighbor&) const = default;
};

// Train triples of one base relation grouped by one endpoint. `keys` are the
// distinct grouping entities in ascending order; group g owns
// members[offsets[g] .. offsets[g + 1]), also ascending.
struct RelationFacet {
  std::vector<EntityId> keys;
  std::vector<std::uint32_t> offsets{0};
  std::vector<EntityId> members;

  std::size_t group_count() const { return keys.size(); }
  std::size_t size() const { return members.size(); }
  std::span<const EntityId> group(std::size_t g) const {
    return {members.data() + offsets[g], members.data() + offsets[g + 1]};
  }
  std::optional<std::size_t> find(EntityId key) const;
  // Group index owning a flattened member position.
  std::size_t group_of(std::size_t position) const;

  bool operator==(const RelationFacet&) const = default;
};

// Immutable, indexed knowledge graph. Safe for concurrent readers.
//
// Structural indexes (neighbors, out-edges, per-relation facets) cover the
// train split only, so sampled context never sees valid/test facts. The
// filter index covers all three splits.
class KnowledgeGraph {
 public:
  explicit KnowledgeGraph(GraphData data);

  KnowledgeGraph(const KnowledgeGraph&) = delete;
  KnowledgeGraph& operator=(const KnowledgeGraph&) = delete;
  KnowledgeGraph(KnowledgeGraph&&) noexcept = default;
  KnowledgeGraph& operator=(KnowledgeGraph&&) noexcept = default;

  const GraphData& data() const { return data_; }

  std::size_t entity_count() const { return data_.entities.size(); }
  std::size_t relation_count() const { return data_.relations.size(); }
  std::span<const Triple> split(Split s) const { return data_.split(s); }

  std::string_view entity_key(EntityId e) const;
  std::string_view relation_key(RelationId r) const;
  std::string_view entity_mention(EntityId e) const;
  std::span<const std::string> entity_aliases(EntityId e) const;
  // Reciprocal relations read as the configured prefix + base mention.
  std::string_view relation_mention(RelationId r) const;
  std::optional<std::string_view> description(EntityId e) const;

  std::optional<EntityId> find_entity(std::string_view key) const;
  std::optional<RelationId> find_relation(std::string_view key) const;
  // Case- and whitespace-insensitive exact match against every alias.
  std::optional<EntityId> match_entity(std::string_view text) const;
  std::optional<RelationId> match_relation(std::string_view text) const;

  // Train neighbors ordered by (relation index, entity).
  std::span<const Neighbor> neighbors(EntityId e) const;
  // Train neighbors of `source` under one directed relation.
  std::span<const Neighbor> out_edges(EntityId source, RelationId r) const;
  // Train triples of a base relation in file order.
  std::span<const Triple> relation_triples(RelationId r) const;

  // Facet grouping the relation's train triples by the directed head
  // (by_directed_head = true) or tail of `r`.
  const RelationFacet& facet(RelationId r, bool by_directed_head) const;

  // Entities e with (source, r, e) in train, valid or test, ascending.
  std::vector<EntityId> filter_set(EntityId source, RelationId r) const;
  bool is_known(EntityId source, RelationId r, EntityId target) const;
  bool in_train(EntityId source, RelationId r, EntityId target) const;

 private:
  void BuildIndexes();

  GraphData data_;
  std::vector<std::string> directed_mentions_;
  std::unordered_map<std::string, EntityId> entity_by_key_;
  std::unordered_map<std::string, std::uint32_t> relation_by_key_;
  std::unordered_map<std::string, EntityId> entity_by_mention_;
  std::unordered_map<std::string, RelationId> relation_by_mention_;

  std::vector<std::uint32_t> neighbor_offsets_;
  std::vector<Neighbor> neighbors_;
  std::vector<std::uint32_t> known_offsets_;
  std::vector<Neighbor> known_;
  std::vector<std::uint32_t> relation_offsets_;
  std::vector<Triple> relation_triples_;
  std::vector<RelationFacet> by_head_;
  std::vector<RelationFacet> by_tail_;
};

// Emits (h, r, gold=t) then (t, r^-1, gold=h) for every triple, in file order.
// The query at position i has query id i.
std::vector<Query> DirectedQueries(const KnowledgeGraph& kg, Split split);

}  // namespace ctxkgc

#endif  // CTXKGC_KNOWLEDGE_GRAPH_H_
