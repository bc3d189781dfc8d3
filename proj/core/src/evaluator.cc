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

#include "ctxkgc/evaluator.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "ctxkgc/errors.h"
#include "ctxkgc/parallel.h"
#include "ctxkgc/random.h"

namespace ctxkgc {

using json = nlohmann::json;

double RankingOutcome::reciprocal_rank() const {
  return no_candidates ? 0.0 : 2.0 / static_cast<double>(twice_rank);
}

bool RankingOutcome::hit_at(std::size_t k) const {
  return !no_candidates && twice_rank <= 2 * static_cast<std::uint64_t>(k);
}

RankingOutcome FilteredRank(std::span<const Candidate> candidates, EntityId gold,
                            std::span<const EntityId> filter) {
  std::optional<double> gold_score;
  std::uint64_t remaining = 0;
  for (const Candidate& c : candidates) {
    if (std::isnan(c.logprob)) throw std::invalid_argument("NaN candidate score");
    if (std::isinf(c.logprob) && c.logprob < 0) continue;
    if (c.entity == gold) {
      gold_score = std::max(gold_score.value_or(c.logprob), c.logprob);
      continue;
    }
    if (std::binary_search(filter.begin(), filter.end(), c.entity)) continue;
    ++remaining;
  }

  RankingOutcome out;
  if (!gold_score) {
    out.twice_rank = 2 * (remaining + 1);
    out.no_candidates = remaining == 0;
    return out;
  }
  std::uint64_t greater = 0;
  std::uint64_t equal = 0;
  for (const Candidate& c : candidates) {
    if (c.entity == gold || (std::isinf(c.logprob) && c.logprob < 0)) continue;
    if (std::binary_search(filter.begin(), filter.end(), c.entity)) continue;
    if (c.logprob > *gold_score) {
      ++greater;
    } else if (c.logprob == *gold_score) {
      ++equal;
    }
  }
  // optimistic = 1 + greater, pessimistic = 1 + greater + equal.
  out.twice_rank = 2 + 2 * greater + equal;
  out.gold_in_candidates = true;
  return out;
}

double Metrics::hits_at(std::size_t k) const {
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
    if (kHitsAt[i] == k) return hits[i];
  }
  throw std::out_of_range(fmt::format("hits@{} is not tracked", k));
}

std::string_view AggregationName(Aggregation a) {
  return a == Aggregation::kPooled ? "pooled" : "per-direction";
}

std::optional<Aggregation> ParseAggregation(std::string_view name) {
  if (name == "pooled") return Aggregation::kPooled;
  if (name == "per-direction") return Aggregation::kPerDirection;
  return std::nullopt;
}

namespace {

Metrics Pooled(std::span<const ScoredQuery> queries, std::optional<bool> head_only) {
  Metrics m;
  // Reciprocal ranks are summed per distinct rank in rank order, so the
  // result does not depend on query order.
  std::map<std::uint64_t, std::size_t> rank_counts;
  std::array<std::size_t, 3> hit_counts{};
  for (const ScoredQuery& q : queries) {
    if (head_only && q.head_prediction != *head_only) continue;
    ++m.query_count;
    if (q.outcome.no_candidates) {
      ++m.no_candidate_queries;
    } else {
      ++rank_counts[q.outcome.twice_rank];
    }
    for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
      if (q.outcome.hit_at(kHitsAt[i])) ++hit_counts[i];
    }
  }
  if (m.query_count == 0) return m;
  double rr_sum = 0.0;
  for (const auto& [twice_rank, count] : rank_counts) {
    rr_sum += static_cast<double>(count) * 2.0 / static_cast<double>(twice_rank);
  }
  const double n = static_cast<double>(m.query_count);
  m.mrr = rr_sum / n;
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
    m.hits[i] = static_cast<double>(hit_counts[i]) / n;
  }
  return m;
}

}  // namespace

Metrics Aggregate(std::span<const ScoredQuery> queries, Aggregation aggregation) {
  if (aggregation == Aggregation::kPooled) return Pooled(queries, std::nullopt);
  const Metrics tail = Pooled(queries, false);
  const Metrics head = Pooled(queries, true);
  if (tail.query_count == 0) return head;
  if (head.query_count == 0) return tail;
  Metrics m;
  m.query_count = tail.query_count + head.query_count;
  m.no_candidate_queries = tail.no_candidate_queries + head.no_candidate_queries;
  m.mrr = (tail.mrr + head.mrr) / 2.0;
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
    m.hits[i] = (tail.hits[i] + head.hits[i]) / 2.0;
  }
  return m;
}

std::string FormatLogRecord(const QueryLogRecord& r) {
  json candidates = json::array();
  for (const auto& [entity, logprob] : r.candidates) {
    candidates.push_back({{"entity", entity}, {"logprob", logprob}});
  }
  const json j = {
      {"query_id", r.query_id},
      {"source", r.source},
      {"relation", r.relation},
      {"direction", r.head_prediction ? "head" : "tail"},
      {"gold", r.gold},
      {"rank", r.outcome.rank()},
      {"twice_rank", r.outcome.twice_rank},
      {"gold_in_candidates", r.outcome.gold_in_candidates},
      {"no_candidates", r.outcome.no_candidates},
      {"candidates", std::move(candidates)},
  };
  return j.dump();
}

QueryLogRecord ParseLogRecord(std::string_view line) {
  const json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("<query log>", 0, "record is not a JSON object");
  }
  try {
    QueryLogRecord r;
    r.query_id = j.at("query_id").get<std::uint64_t>();
    r.source = j.at("source").get<std::string>();
    r.relation = j.at("relation").get<std::string>();
    const std::string direction = j.at("direction").get<std::string>();
    if (direction != "head" && direction != "tail") {
      throw ParseError("<query log>", 0, "direction must be head or tail");
    }
    r.head_prediction = direction == "head";
    r.gold = j.at("gold").get<std::string>();
    r.outcome.twice_rank = j.at("twice_rank").get<std::uint64_t>();
    r.outcome.gold_in_candidates = j.at("gold_in_candidates").get<bool>();
    r.outcome.no_candidates = j.at("no_candidates").get<bool>();
    for (const json& c : j.at("candidates")) {
      r.candidates.emplace_back(c.at("entity").get<std::string>(),
                                c.at("logprob").get<double>());
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError("<query log>", 0, e.what());
  }
}

namespace {

// Complete, well-formed records from the start of the log, plus the byte
// length they occupy.
std::pair<std::vector<QueryLogRecord>, std::size_t> ReadLogPrefix(
    const std::filesystem::path& path) {
  std::vector<QueryLogRecord> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return {records, 0};
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  std::size_t start = 0;
  while (start < bytes.size()) {
    const std::size_t end = bytes.find('\n', start);
    if (end == std::string::npos) break;
    try {
      records.push_back(ParseLogRecord(std::string_view(bytes).substr(start, end - start)));
    } catch (const ParseError&) {
      break;
    }
    start = end + 1;
  }
  return {records, start};
}

}  // namespace

std::vector<QueryLogRecord> ReadQueryLog(const std::filesystem::path& path) {
  return ReadLogPrefix(path).first;
}

EvaluationResult Evaluate(const KnowledgeGraph& kg, SequenceModel& model,
                          const EvaluationOptions& options) {
  options.selector.Validate();
  std::vector<Query> queries = DirectedQueries(kg, options.split);
  if (options.max_queries && *options.max_queries < queries.size()) {
    queries.resize(*options.max_queries);
  }
  const std::uint64_t split_tag = static_cast<std::uint64_t>(options.split);

  EvaluationResult result;
  result.queries.resize(queries.size());
  const auto make_record = [&](std::uint64_t id, const Query& q) {
    QueryLogRecord r;
    r.query_id = id;
    r.source = std::string(kg.entity_key(q.source));
    r.relation = std::string(kg.relation_key(q.relation));
    r.head_prediction = q.relation.is_reciprocal();
    r.gold = std::string(kg.entity_key(*q.gold));
    return r;
  };

  std::size_t start = 0;
  std::ofstream log;
  if (options.log_path) {
    if (options.resume) {
      auto [records, bytes] = ReadLogPrefix(*options.log_path);
      if (records.size() > queries.size()) {
        throw ConfigError("existing query log is longer than this evaluation");
      }
      for (std::size_t i = 0; i < records.size(); ++i) {
        const QueryLogRecord expected = make_record(i, queries[i]);
        const QueryLogRecord& got = records[i];
        if (got.query_id != i || got.source != expected.source ||
            got.relation != expected.relation ||
            got.head_prediction != expected.head_prediction || got.gold != expected.gold) {
          throw ConfigError(fmt::format(
              "query log record {} does not match this evaluation", i));
        }
        result.queries[i] = ScoredQuery{i, got.head_prediction, got.outcome};
      }
      start = records.size();
      if (std::filesystem::exists(*options.log_path)) {
        std::filesystem::resize_file(*options.log_path, bytes);
      }
      log.open(*options.log_path, std::ios::binary | std::ios::app);
    } else {
      log.open(*options.log_path, std::ios::binary | std::ios::trunc);
    }
    if (!log) {
      throw ConfigError(fmt::format("cannot write {}", options.log_path->string()));
    }
  }
  result.resumed_queries = start;

  struct Done {
    ScoredQuery scored;
    std::string line;
  };
  OrderedParallelFor<Done>(
      queries.size() - start, options.workers,
      [&](std::size_t i) {
        const std::uint64_t id = start + i;
        const Query& q = queries[id];
        Rng rng(DeriveSeed(options.selector.seed, SeedStream::kEvaluation, split_tag, id));
        const ContextBundle bundle = SelectContext(kg, q, options.selector, rng);
        const VerbalizedInput input = Verbalize(kg, q, bundle, options.verbalizer);
        CandidateOptions candidate_options = options.candidates;
        candidate_options.seed =
            DeriveSeed(options.selector.seed, SeedStream::kModelSampling, split_tag, id);
        const CandidateSet candidates =
            GenerateCandidates(model, input.text, kg, candidate_options);
        const std::vector<EntityId> filter = kg.filter_set(q.source, q.relation);
        Done done;
        done.scored = ScoredQuery{id, q.relation.is_reciprocal(),
                                  FilteredRank(candidates.entries, *q.gold, filter)};
        if (options.log_path) {
          QueryLogRecord record = make_record(id, q);
          record.outcome = done.scored.outcome;
          for (const Candidate& c : candidates.entries) {
            record.candidates.emplace_back(std::string(kg.entity_key(c.entity)), c.logprob);
          }
          done.line = FormatLogRecord(record);
        }
        return done;
      },
      [&](std::size_t i, Done done) {
        result.queries[start + i] = done.scored;
        if (log.is_open()) {
          log << done.line << '\n';
          log.flush();
        }
      });

  result.metrics = Aggregate(result.queries, options.aggregation);
  std::vector<ScoredQuery> tails;
  std::vector<ScoredQuery> heads;
  for (const ScoredQuery& q : result.queries) {
    (q.head_prediction ? heads : tails).push_back(q);
  }
  result.tail_metrics = Aggregate(tails);
  result.head_metrics = Aggregate(heads);
  return result;
}

}  // namespace ctxkgc
