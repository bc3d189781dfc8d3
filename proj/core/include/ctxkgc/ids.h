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

#ifndef CTXKGC_IDS_H_
#define CTXKGC_IDS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace ctxkgc {

// Dense index into the entity interning table.
struct EntityId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const EntityId&) const = default;
};

// A directed relation. The encoding is `2 * base + reciprocal`, so a base
// relation and its reciprocal share a base index but never collide, and
// directed ids are themselves dense over [0, 2 * relation_count).
class RelationId {
 public:
  constexpr RelationId() = default;

  static constexpr RelationId Base(std::uint32_t base) {
    return RelationId(base << 1);
  }
  static constexpr RelationId FromIndex(std::uint32_t directed_index) {
    return RelationId(directed_index);
  }

  constexpr std::uint32_t base() const { return encoded_ >> 1; }
  constexpr bool is_reciprocal() const { return (encoded_ & 1U) != 0; }
  // Dense directed index in [0, 2 * relation_count).
  constexpr std::uint32_t index() const { return encoded_; }
  constexpr RelationId reciprocal() const { return RelationId(encoded_ ^ 1U); }
  constexpr RelationId base_relation() const { return RelationId(encoded_ & ~1U); }

  constexpr auto operator<=>(const RelationId&) const = default;

 private:
  constexpr explicit RelationId(std::uint32_t encoded) : encoded_(encoded) {}
  std::uint32_t encoded_ = 0;
};

// A stored fact. `relation` is always a base relation.
struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  constexpr auto operator<=>(const Triple&) const = default;
};

enum class Split : std::uint8_t { kTrain = 0, kValid = 1, kTest = 2 };

inline constexpr Split kAllSplits[] = {Split::kTrain, Split::kValid,
                                       Split::kTest};

std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

// An incomplete triple (source, relation, ?). Head prediction for (h, r, t)
// is posed as (t, r^-1, ?).
struct Query {
  EntityId source;
  RelationId relation;
  std::optional<EntityId> gold;

  bool operator==(const Query&) const = default;
};

// Base-form reading of a directed edge (source, relation, target).
constexpr Triple CanonicalTriple(EntityId source, RelationId relation,
                                 EntityId target) {
  if (relation.is_reciprocal()) {
    return Triple{target, relation.base_relation(), source};
  }
  return Triple{source, relation, target};
}

}  // namespace ctxkgc

template <>
struct std::hash<ctxkgc::EntityId> {
  std::size_t operator()(ctxkgc::EntityId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

template <>
struct std::hash<ctxkgc::RelationId> {
  std::size_t operator()(ctxkgc::RelationId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.index());
  }
};

template <>
struct std::hash<ctxkgc::Triple> {
  std::size_t operator()(const ctxkgc::Triple& t) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(t.head.value) << 32) |
                      t.tail.value;
    h ^= static_cast<std::uint64_t>(t.relation.index()) * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return static_cast<std::size_t>(h);
  }
};

#endif  // CTXKGC_IDS_H_
