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

#ifndef CTXKGC_TESTS_SUPPORT_RANK_ORACLE_H_
#define CTXKGC_TESTS_SUPPORT_RANK_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ctxkgc/model.h"

namespace ctxkgc::testing {

// Exhaustive reference: filter, sort, then locate gold's tie group by
// explicit position. Returns (twice the mean rank, empty-set flag).
struct ReferenceRank {
  std::uint64_t twice_rank;
  bool no_candidates;
  bool gold_present;
};

inline ReferenceRank ReferenceFilteredRank(const std::vector<Candidate>& candidates,
                                           EntityId gold, const std::set<EntityId>& filter) {
  std::vector<std::pair<double, bool>> kept;  // (score, is_gold)
  for (const Candidate& c : candidates) {
    if (c.logprob == -INFINITY) continue;
    if (c.entity != gold && filter.count(c.entity)) continue;
    kept.emplace_back(c.logprob, c.entity == gold);
  }
  const bool present = std::any_of(kept.begin(), kept.end(), [](auto& k) { return k.second; });
  if (!present) {
    return {2 * (kept.size() + 1), kept.empty(), false};
  }
  std::sort(kept.begin(), kept.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double g = 0;
  for (auto& k : kept) {
    if (k.second) g = k.first;
  }
  std::size_t first = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i].first == g) {
      if (first == 0) first = i + 1;
      last = i + 1;
    }
  }
  return {first + last, false, true};
}

// Random candidate set over entities [0, universe) with coarse scores so
// ties are common, optional -inf entries, and a random filter.
struct RankCase {
  std::vector<Candidate> candidates;
  EntityId gold;
  std::vector<EntityId> filter;  // sorted
};

inline RankCase RandomRankCase(std::mt19937_64& rng, std::uint32_t universe = 15) {
  RankCase c;
  std::uniform_int_distribution<int> score(-6, 0);
  std::bernoulli_distribution coin(0.5), rare(0.1), filtered(0.3);
  c.gold = EntityId{static_cast<std::uint32_t>(rng() % universe)};
  for (std::uint32_t e = 0; e < universe; ++e) {
    if (!coin(rng)) continue;
    const double s = rare(rng) ? -INFINITY : 0.5 * score(rng);
    c.candidates.push_back(Candidate{EntityId{e}, s});
  }
  std::shuffle(c.candidates.begin(), c.candidates.end(), rng);
  for (std::uint32_t e = 0; e < universe; ++e) {
    // Gold is always a known completion.
    if (e == c.gold.value || filtered(rng)) c.filter.push_back(EntityId{e});
  }
  return c;
}

}  // namespace ctxkgc::testing

#endif  // CTXKGC_TESTS_SUPPORT_RANK_ORACLE_H_
