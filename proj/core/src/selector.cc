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

#include "ctxkgc/selector.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "ctxkgc/errors.h"

namespace ctxkgc {

std::string_view CardinalityName(CardinalityClass c) {
  switch (c) {
    case CardinalityClass::kOneToOne:
      return "1-1";
    case CardinalityClass::kOneToMany:
      return "1-n";
    case CardinalityClass::kManyToOne:
      return "n-1";
    case CardinalityClass::kManyToMany:
      return "n-n";
  }
  return "?";
}

CardinalityClass Transpose(CardinalityClass c) {
  switch (c) {
    case CardinalityClass::kOneToMany:
      return CardinalityClass::kManyToOne;
    case CardinalityClass::kManyToOne:
      return CardinalityClass::kOneToMany;
    default:
      return c;
  }
}

std::string_view StrategyName(SamplingStrategy s) {
  switch (s) {
    case SamplingStrategy::kCustomized:
      return "customized";
    case SamplingStrategy::kRandom:
      return "random";
    case SamplingStrategy::kNoRelationContext:
      return "no-relation-context";
  }
  return "?";
}

std::optional<SamplingStrategy> ParseStrategy(std::string_view name) {
  if (name == "customized") return SamplingStrategy::kCustomized;
  if (name == "random" || name == "random-sampling") return SamplingStrategy::kRandom;
  if (name == "no-relation-context") return SamplingStrategy::kNoRelationContext;
  return std::nullopt;
}

void SelectorConfig::Validate() const {
  if (!(cardinality_threshold > 0.0) || !std::isfinite(cardinality_threshold)) {
    throw ConfigError(fmt::format("cardinality_threshold must be positive, got {}",
                                  cardinality_threshold));
  }
}

double CardinalityStats::tails_per_head() const {
  return distinct_heads == 0 ? 0.0
                             : static_cast<double>(triples) /
                                   static_cast<double>(distinct_heads);
}

double CardinalityStats::heads_per_tail() const {
  return distinct_tails == 0 ? 0.0
                             : static_cast<double>(triples) /
                                   static_cast<double>(distinct_tails);
}

CardinalityStats RelationStats(const KnowledgeGraph& kg, RelationId relation) {
  const RelationFacet& heads = kg.facet(relation, /*by_directed_head=*/true);
  const RelationFacet& tails = kg.facet(relation, /*by_directed_head=*/false);
  return CardinalityStats{heads.size(), heads.group_count(), tails.group_count()};
}

CardinalityClass ClassifyCardinality(const KnowledgeGraph& kg,
                                     RelationId relation, double threshold) {
  const CardinalityStats stats = RelationStats(kg, relation);
  if (stats.triples == 0) {
    throw DataError(fmt::format("relation '{}' has no train triples",
                                kg.relation_key(relation)));
  }
  const bool many_tails = stats.tails_per_head() > threshold;
  const bool many_heads = stats.heads_per_tail() > threshold;
  if (many_tails && many_heads) return CardinalityClass::kManyToMany;
  if (many_tails) return CardinalityClass::kOneToMany;
  if (many_heads) return CardinalityClass::kManyToOne;
  return CardinalityClass::kOneToOne;
}

std::vector<Neighbor> SampleEntityNeighborhood(const KnowledgeGraph& kg,
                                               const Query& query,
                                               const SelectorConfig& config,
                                               Rng& rng) {
  std::vector<Neighbor> out;
  if (config.neighborhood_cap == 0) return out;

  std::optional<Triple> target;
  if (query.gold) target = CanonicalTriple(query.source, query.relation, *query.gold);

  struct Group {
    RelationId relation;
    std::vector<EntityId> members;
    std::size_t taken = 0;
  };
  std::vector<Group> groups;
  for (const Neighbor& n : kg.neighbors(query.source)) {
    if (target && CanonicalTriple(query.source, n.relation, n.entity) == *target) {
      continue;
    }
    if (groups.empty() || groups.back().relation != n.relation) {
      groups.push_back(Group{n.relation, {}, 0});
    }
    groups.back().members.push_back(n.entity);
  }
  // Neighbors arrive sorted by relation, so a stable sort keeps relation id
  // order among equal-sized groups.
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return a.members.size() > b.members.size();
  });

  bool progressed = true;
  while (progressed && out.size() < config.neighborhood_cap) {
    progressed = false;
    for (Group& g : groups) {
      if (g.taken == g.members.size()) continue;
      const std::size_t j = UniformIndex(rng, g.taken, g.members.size() - 1);
      std::swap(g.members[g.taken], g.members[j]);
      out.push_back(Neighbor{g.relation, g.members[g.taken++]});
      progressed = true;
      if (out.size() == config.neighborhood_cap) break;
    }
  }
  return out;
}

namespace {

// Yields a uniformly random permutation of the positions in [first, last)
// that fall outside `excluded` (disjoint half-open ranges), one at a time.
// Large ranges start with rejection sampling and switch to an explicit pool
// once a quarter of the eligible positions has been drawn.
class LazyPermutation {
 public:
  using Range = std::pair<std::size_t, std::size_t>;

  LazyPermutation(std::size_t first, std::size_t last,
                  std::vector<Range> excluded, Rng& rng)
      : first_(first), last_(last), excluded_(std::move(excluded)), rng_(&rng) {
    eligible_ = last_ - first_;
    for (auto& [lo, hi] : excluded_) {
      lo = std::clamp(lo, first_, last_);
      hi = std::clamp(hi, lo, last_);
      eligible_ -= hi - lo;
    }
    constexpr std::size_t kDenseRange = 256;
    if (last_ - first_ <= kDenseRange || 2 * eligible_ < last_ - first_) {
      Densify();
    }
  }

  std::optional<std::size_t> Next() {
    if (!dense_) {
      if (4 * drawn_.size() >= eligible_) {
        Densify();
      } else {
        for (;;) {
          const std::size_t p = UniformIndex(*rng_, first_, last_ - 1);
          if (IsExcluded(p) || !drawn_.insert(p).second) continue;
          return p;
        }
      }
    }
    if (taken_ == pool_.size()) return std::nullopt;
    const std::size_t j = UniformIndex(*rng_, taken_, pool_.size() - 1);
    std::swap(pool_[taken_], pool_[j]);
    return pool_[taken_++];
  }

 private:
  bool IsExcluded(std::size_t p) const {
    for (const auto& [lo, hi] : excluded_) {
      if (p >= lo && p < hi) return true;
    }
    return false;
  }

  void Densify() {
    pool_.clear();
    pool_.reserve(eligible_ - drawn_.size());
    for (std::size_t p = first_; p < last_; ++p) {
      if (!IsExcluded(p) && !drawn_.count(p)) pool_.push_back(p);
    }
    taken_ = 0;
    dense_ = true;
  }

  std::size_t first_;
  std::size_t last_;
  std::vector<Range> excluded_;
  Rng* rng_;
  std::size_t eligible_ = 0;
  bool dense_ = false;
  std::unordered_set<std::size_t> drawn_;
  std::vector<std::size_t> pool_;
  std::size_t taken_ = 0;
};

struct DirectedPair {
  EntityId head;
  EntityId tail;

  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(head.value) << 32) | tail.value;
  }
};

// The relation's train triples read in the query direction, plus where the
// target triple sits in each facet.
class PoolView {
 public:
  PoolView(const KnowledgeGraph& kg, const Query& query)
      : by_head_(kg.facet(query.relation, true)),
        by_tail_(kg.facet(query.relation, false)),
        source_(query.source) {
    if (query.gold && kg.in_train(query.source, query.relation, *query.gold)) {
      target_in_head_ = PositionOf(by_head_, query.source, *query.gold);
      target_in_tail_ = PositionOf(by_tail_, *query.gold, query.source);
    }
  }

  std::size_t size() const { return by_head_.size(); }
  const RelationFacet& by_head() const { return by_head_; }
  const RelationFacet& by_tail() const { return by_tail_; }
  EntityId source() const { return source_; }

  DirectedPair AtHead(std::size_t pos) const {
    return {by_head_.keys[by_head_.group_of(pos)], by_head_.members[pos]};
  }
  DirectedPair AtTail(std::size_t pos) const {
    return {by_tail_.members[pos], by_tail_.keys[by_tail_.group_of(pos)]};
  }

  std::vector<LazyPermutation::Range> TargetInHead() const {
    if (!target_in_head_) return {};
    return {{*target_in_head_, *target_in_head_ + 1}};
  }
  std::optional<std::size_t> target_in_tail() const { return target_in_tail_; }

 private:
  static std::optional<std::size_t> PositionOf(const RelationFacet& facet,
                                               EntityId key, EntityId member) {
    const auto g = facet.find(key);
    if (!g) return std::nullopt;
    const auto group = facet.group(*g);
    const auto it = std::lower_bound(group.begin(), group.end(), member);
    if (it == group.end() || *it != member) return std::nullopt;
    return facet.offsets[*g] + static_cast<std::size_t>(it - group.begin());
  }

  const RelationFacet& by_head_;
  const RelationFacet& by_tail_;
  EntityId source_;
  std::optional<std::size_t> target_in_head_;
  std::optional<std::size_t> target_in_tail_;
};

class PairStream {
 public:
  virtual ~PairStream() = default;
  virtual std::optional<DirectedPair> Next() = 0;
};

// Uniform without replacement over the whole pool.
class UniformStream final : public PairStream {
 public:
  UniformStream(const PoolView& pool, Rng& rng)
      : pool_(pool), perm_(0, pool.size(), pool.TargetInHead(), rng) {}

  std::optional<DirectedPair> Next() override {
    const auto pos = perm_.Next();
    if (!pos) return std::nullopt;
    return pool_.AtHead(*pos);
  }

 private:
  const PoolView& pool_;
  LazyPermutation perm_;
};

// 1-n rule: triples headed by the query source first, then the rest.
class SourceFirstStream final : public PairStream {
 public:
  SourceFirstStream(const PoolView& pool, Rng& rng)
      : pool_(pool), rng_(rng) {
    std::size_t lo = 0;
    std::size_t hi = 0;
    if (const auto g = pool.by_head().find(pool.source())) {
      lo = pool.by_head().offsets[*g];
      hi = pool.by_head().offsets[*g + 1];
    }
    priority_.emplace(lo, hi, pool.TargetInHead(), rng);
    auto rest = pool.TargetInHead();
    rest.emplace_back(lo, hi);
    rest_excluded_ = std::move(rest);
  }

  std::optional<DirectedPair> Next() override {
    if (priority_) {
      if (const auto pos = priority_->Next()) return pool_.AtHead(*pos);
      priority_.reset();
      rest_.emplace(0, pool_.size(), std::move(rest_excluded_), rng_);
    }
    if (const auto pos = rest_->Next()) return pool_.AtHead(*pos);
    return std::nullopt;
  }

 private:
  const PoolView& pool_;
  Rng& rng_;
  std::optional<LazyPermutation> priority_;
  std::optional<LazyPermutation> rest_;
  std::vector<LazyPermutation::Range> rest_excluded_;
};

// n-1 rule: one triple per distinct tail, tails in random order, then the
// remaining triples uniformly.
class DistinctTailStream final : public PairStream {
 public:
  DistinctTailStream(const PoolView& pool, Rng& rng) : pool_(pool), rng_(rng) {
    std::vector<LazyPermutation::Range> excluded_groups;
    if (const auto t = pool.target_in_tail()) {
      const std::size_t g = pool.by_tail().group_of(*t);
      if (pool.by_tail().group(g).size() == 1) excluded_groups.emplace_back(g, g + 1);
    }
    groups_.emplace(0, pool.by_tail().group_count(), std::move(excluded_groups), rng);
  }

  std::optional<DirectedPair> Next() override {
    const RelationFacet& facet = pool_.by_tail();
    if (groups_) {
      if (const auto g = groups_->Next()) {
        std::size_t lo = facet.offsets[*g];
        std::size_t hi = facet.offsets[*g + 1];
        const auto target = pool_.target_in_tail();
        const bool skip_target = target && *target >= lo && *target < hi;
        std::size_t pos = UniformIndex(rng_, lo, hi - 1 - (skip_target ? 1 : 0));
        if (skip_target && pos >= *target) ++pos;
        picked_.insert(pos);
        return pool_.AtTail(pos);
      }
      groups_.reset();
      std::vector<LazyPermutation::Range> excluded;
      if (const auto t = pool_.target_in_tail()) excluded.emplace_back(*t, *t + 1);
      rest_.emplace(0, facet.size(), std::move(excluded), rng_);
    }
    while (const auto pos = rest_->Next()) {
      if (!picked_.count(*pos)) return pool_.AtTail(*pos);
    }
    return std::nullopt;
  }

 private:
  const PoolView& pool_;
  Rng& rng_;
  std::optional<LazyPermutation> groups_;
  std::optional<LazyPermutation> rest_;
  std::unordered_set<std::size_t> picked_;
};

// Pulls distinct pairs from `stream` into `out` until it holds `limit`.
void Fill(PairStream& stream, std::size_t limit, std::vector<DirectedPair>& out,
          std::unordered_set<std::uint64_t>& seen) {
  while (out.size() < limit) {
    const auto pair = stream.Next();
    if (!pair) return;
    if (seen.insert(pair->key()).second) out.push_back(*pair);
  }
}

}  // namespace

std::vector<Triple> SampleRelationContext(const KnowledgeGraph& kg,
                                          const Query& query,
                                          const SelectorConfig& config,
                                          Rng& rng) {
  const std::size_t cap = config.relation_cap;
  if (cap == 0 || config.strategy == SamplingStrategy::kNoRelationContext) return {};
  const PoolView pool(kg, query);
  if (pool.size() == 0) return {};

  std::vector<DirectedPair> picked;
  std::unordered_set<std::uint64_t> seen;
  picked.reserve(std::min(cap, pool.size()));

  if (config.strategy == SamplingStrategy::kRandom) {
    UniformStream stream(pool, rng);
    Fill(stream, cap, picked, seen);
  } else {
    switch (ClassifyCardinality(kg, query.relation, config.cardinality_threshold)) {
      case CardinalityClass::kOneToOne: {
        UniformStream stream(pool, rng);
        Fill(stream, cap, picked, seen);
        break;
      }
      case CardinalityClass::kOneToMany: {
        SourceFirstStream stream(pool, rng);
        Fill(stream, cap, picked, seen);
        break;
      }
      case CardinalityClass::kManyToOne: {
        DistinctTailStream stream(pool, rng);
        Fill(stream, cap, picked, seen);
        break;
      }
      case CardinalityClass::kManyToMany: {
        SourceFirstStream source_first(pool, rng);
        DistinctTailStream distinct_tail(pool, rng);
        const std::size_t first_half = (cap + 1) / 2;
        Fill(source_first, first_half, picked, seen);
        Fill(distinct_tail, picked.size() + cap / 2, picked, seen);
        // Backfill whichever half came up short.
        Fill(source_first, cap, picked, seen);
        Fill(distinct_tail, cap, picked, seen);
        break;
      }
    }
  }

  std::vector<Triple> out;
  out.reserve(picked.size());
  for (const DirectedPair& p : picked) {
    out.push_back(CanonicalTriple(p.head, query.relation, p.tail));
  }
  return out;
}

ContextBundle SelectContext(const KnowledgeGraph& kg, const Query& query,
                            const SelectorConfig& config, Rng& rng) {
  ContextBundle bundle;
  for (const Neighbor& n : SampleEntityNeighborhood(kg, query, config, rng)) {
    bundle.neighborhood.push_back(NeighborhoodItem{
        n.relation, n.entity, kg.relation_mention(n.relation),
        kg.entity_mention(n.entity)});
  }
  for (const Triple& t : SampleRelationContext(kg, query, config, rng)) {
    const bool reversed = query.relation.is_reciprocal();
    const EntityId head = reversed ? t.tail : t.head;
    const EntityId tail = reversed ? t.head : t.tail;
    bundle.relation_context.push_back(RelationContextItem{
        t, head, tail, kg.entity_mention(head), kg.entity_mention(tail)});
  }
  return bundle;
}

bool BundleLeaksTarget(const Query& query, const ContextBundle& bundle) {
  if (!query.gold) return false;
  const Triple target = CanonicalTriple(query.source, query.relation, *query.gold);
  for (const auto& item : bundle.neighborhood) {
    if (CanonicalTriple(query.source, item.relation, item.entity) == target) return true;
  }
  for (const auto& item : bundle.relation_context) {
    if (item.triple == target) return true;
  }
  return false;
}

}  // namespace ctxkgc
