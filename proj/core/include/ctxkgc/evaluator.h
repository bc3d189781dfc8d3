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

#ifndef CTXKGC_EVALUATOR_H_
#define CTXKGC_EVALUATOR_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxkgc/ids.h"
#include "ctxkgc/knowledge_graph.h"
#include "ctxkgc/model.h"
#include "ctxkgc/selector.h"
#include "ctxkgc/verbalizer.h"

namespace ctxkgc {

// Filtered rank of the gold entity, kept exact as twice the mean rank.
struct RankingOutcome {
  // optimistic + pessimistic rank; the mean rank is twice_rank / 2.
  std::uint64_t twice_rank = 2;
  bool gold_in_candidates = false;
  // Gold absent and no candidate left after filtering. Such a query scores
  // reciprocal rank 0 and no hits instead of the nominal rank 1.
  bool no_candidates = false;

  double rank() const { return static_cast<double>(twice_rank) / 2.0; }
  double reciprocal_rank() const;
  bool hit_at(std::size_t k) const;

  bool operator==(const RankingOutcome&) const = default;
};

// Removes every entity of `filter` except `gold` from the candidates, then
// ranks gold with mean-rank tie handling: optimistic = 1 + #{score > g},
// pessimistic = #{score >= g} including gold. An absent gold scores -inf and
// so ranks after every remaining candidate. Candidates with -inf scores are
// treated as absent. `filter` must be sorted ascending. Throws
// std::invalid_argument on a NaN score.
RankingOutcome FilteredRank(std::span<const Candidate> candidates,
                            EntityId gold, std::span<const EntityId> filter);

inline constexpr std::array<std::size_t, 3> kHitsAt = {1, 3, 10};

struct Metrics {
  double mrr = 0.0;
  // Indexed like kHitsAt.
  std::array<double, 3> hits{};
  std::size_t query_count = 0;
  std::size_t no_candidate_queries = 0;

  double hits_at(std::size_t k) const;
};

enum class Aggregation : std::uint8_t {
  // Mean over all directed queries, head and tail prediction together.
  kPooled,
  // Mean of the tail-prediction and head-prediction means.
  kPerDirection,
};

std::string_view AggregationName(Aggregation a);
std::optional<Aggregation> ParseAggregation(std::string_view name);

struct ScoredQuery {
  std::uint64_t query_id = 0;
  bool head_prediction = false;  // reciprocal-direction query
  RankingOutcome outcome;
};

Metrics Aggregate(std::span<const ScoredQuery> queries,
                  Aggregation aggregation = Aggregation::kPooled);

// One line of the per-query log.
struct QueryLogRecord {
  std::uint64_t query_id = 0;
  std::string source;    // raw entity id
  std::string relation;  // raw base relation id
  bool head_prediction = false;
  std::string gold;
  RankingOutcome outcome;
  std::vector<std::pair<std::string, double>> candidates;

  bool operator==(const QueryLogRecord&) const = default;
};

// JSON object on one line, without the trailing newline. Keys:
//   query_id, source, relation, direction ("tail"|"head"), gold, rank,
//   twice_rank, gold_in_candidates, no_candidates, candidates [{entity, logprob}]
std::string FormatLogRecord(const QueryLogRecord& record);
// Throws ParseError (line 0) on malformed input.
QueryLogRecord ParseLogRecord(std::string_view line);

// Reads a per-query log; stops at the first incomplete or malformed line.
std::vector<QueryLogRecord> ReadQueryLog(const std::filesystem::path& path);

struct EvaluationOptions {
  Split split = Split::kTest;
  SelectorConfig selector;
  VerbalizerOptions verbalizer;
  CandidateOptions candidates;
  // 0 = one per hardware thread.
  std::size_t workers = 0;
  Aggregation aggregation = Aggregation::kPooled;
  // Per-query log; doubles as the resume checkpoint.
  std::optional<std::filesystem::path> log_path;
  // Keep the completed prefix of an existing log and continue after it.
  bool resume = false;
  // Evaluate only the first N directed queries.
  std::optional<std::size_t> max_queries;
};

struct EvaluationResult {
  Metrics metrics;
  Metrics tail_metrics;
  Metrics head_metrics;
  std::size_t resumed_queries = 0;
  std::vector<ScoredQuery> queries;
};

// Runs every directed query of the split through selection, verbalization,
// candidate generation and filtered ranking. Each query's randomness is
// derived from (selector.seed, split, query id), so results do not depend
// on worker count. A backend error aborts the run after the contiguous
// prefix of finished queries has been logged, and is rethrown.
EvaluationResult Evaluate(const KnowledgeGraph& kg, SequenceModel& model,
                          const EvaluationOptions& options);

}  // namespace ctxkgc

#endif  // CTXKGC_EVALUATOR_H_
