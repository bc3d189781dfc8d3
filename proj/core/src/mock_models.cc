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

#include "ctxkgc/mock_models.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ctxkgc/random.h"
#include "ctxkgc/snapshot.h"
#include "ctxkgc/text.h"

namespace ctxkgc {
namespace {

constexpr std::string_view kQueryHeader = "query: ";
constexpr std::string_view kContextHeader = "relation context: ";
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Rng SeededRng(std::string_view input, std::optional<std::uint64_t> seed) {
  return Rng(SplitMix64(seed.value_or(0) ^ Fingerprint(input)));
}

std::string_view TrimSpaces(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

// Splits "left | right" at the first " | " for which accept(left, right)
// holds; falls back to the first occurrence.
template <typename Accept>
std::optional<std::pair<std::string_view, std::string_view>> SplitPair(
    std::string_view item, Accept&& accept) {
  constexpr std::string_view kBar = " | ";
  std::optional<std::pair<std::string_view, std::string_view>> first;
  for (std::size_t pos = item.find(kBar); pos != std::string_view::npos;
       pos = item.find(kBar, pos + 1)) {
    std::pair<std::string_view, std::string_view> split{
        item.substr(0, pos), item.substr(pos + kBar.size())};
    if (accept(split.first, split.second)) return split;
    if (!first) first = split;
  }
  return first;
}

}  // namespace

std::vector<std::string_view> SplitSegments(std::string_view input,
                                            std::string_view separator) {
  std::vector<std::string_view> out;
  if (separator.empty()) {
    out.push_back(TrimSpaces(input));
    return out;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = input.find(separator, start);
    if (pos == std::string_view::npos) {
      out.push_back(TrimSpaces(input.substr(start)));
      return out;
    }
    out.push_back(TrimSpaces(input.substr(start, pos - start)));
    start = pos + separator.size();
  }
}

MockNeighborCopyModel::MockNeighborCopyModel(const KnowledgeGraph& kg,
                                             std::string separator)
    : kg_(kg), separator_(std::move(separator)) {}

std::map<EntityId, std::size_t> MockNeighborCopyModel::ContextCounts(
    std::string_view input) const {
  std::map<EntityId, std::size_t> counts;
  const auto segments = SplitSegments(input, separator_);
  bool in_context = false;
  for (std::string_view segment : segments) {
    if (!in_context) {
      if (!segment.starts_with(kContextHeader)) continue;
      segment.remove_prefix(kContextHeader.size());
      in_context = true;
    }
    const auto split = SplitPair(segment, [&](std::string_view l, std::string_view r) {
      return kg_.match_entity(l) && kg_.match_entity(r);
    });
    if (!split) continue;
    for (std::string_view side : {split->first, split->second}) {
      if (const auto e = kg_.match_entity(side)) ++counts[*e];
    }
  }
  return counts;
}

std::vector<Sample> MockNeighborCopyModel::DrawSamples(
    std::string_view input, std::size_t n, std::size_t /*max_new_tokens*/,
    std::optional<std::uint64_t> seed) {
  Rng rng = SeededRng(input, seed);
  std::vector<Sample> out;
  out.reserve(n);
  const auto counts = ContextCounts(input);
  if (counts.empty()) {
    const double logprob = -std::log(static_cast<double>(kg_.entity_count()));
    for (std::size_t i = 0; i < n; ++i) {
      const EntityId e{static_cast<std::uint32_t>(
          UniformIndex(rng, 0, kg_.entity_count() - 1))};
      out.push_back(Sample{std::string(kg_.entity_mention(e)), logprob});
    }
    return out;
  }

  std::vector<EntityId> entities;
  std::vector<std::size_t> cumulative;
  std::size_t total = 0;
  for (const auto& [e, c] : counts) {
    total += c;
    entities.push_back(e);
    cumulative.push_back(total);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t u = UniformIndex(rng, 0, total - 1);
    const std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    const std::size_t c = counts.at(entities[k]);
    out.push_back(Sample{std::string(kg_.entity_mention(entities[k])),
                         std::log(static_cast<double>(c) / static_cast<double>(total))});
  }
  return out;
}

std::vector<double> MockNeighborCopyModel::ScoreOutputs(
    std::string_view input, std::span<const std::string> outputs) {
  const auto counts = ContextCounts(input);
  std::size_t total = 0;
  for (const auto& [e, c] : counts) total += c;
  std::vector<double> out;
  out.reserve(outputs.size());
  for (const std::string& text : outputs) {
    const auto e = kg_.match_entity(text);
    if (!e) {
      out.push_back(kNegInf);
    } else if (counts.empty()) {
      out.push_back(-std::log(static_cast<double>(kg_.entity_count())));
    } else if (const auto it = counts.find(*e); it != counts.end()) {
      out.push_back(std::log(static_cast<double>(it->second) / static_cast<double>(total)));
    } else {
      out.push_back(kNegInf);
    }
  }
  return out;
}

std::size_t MockNeighborCopyModel::CountTokens(std::string_view text) {
  return CountWhitespacePieces(text);
}

UniformRandomModel::UniformRandomModel(const KnowledgeGraph& kg) : kg_(kg) {}

std::vector<Sample> UniformRandomModel::DrawSamples(
    std::string_view input, std::size_t n, std::size_t /*max_new_tokens*/,
    std::optional<std::uint64_t> seed) {
  Rng rng = SeededRng(input, seed);
  const double logprob = -std::log(static_cast<double>(kg_.entity_count()));
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EntityId e{static_cast<std::uint32_t>(UniformIndex(rng, 0, kg_.entity_count() - 1))};
    out.push_back(Sample{std::string(kg_.entity_mention(e)), logprob});
  }
  return out;
}

std::vector<double> UniformRandomModel::ScoreOutputs(
    std::string_view /*input*/, std::span<const std::string> outputs) {
  const double logprob = -std::log(static_cast<double>(kg_.entity_count()));
  std::vector<double> out;
  for (const std::string& text : outputs) {
    out.push_back(kg_.match_entity(text) ? logprob : kNegInf);
  }
  return out;
}

std::size_t UniformRandomModel::CountTokens(std::string_view text) {
  return CountWhitespacePieces(text);
}

GoldOracleModel::GoldOracleModel(const KnowledgeGraph& kg, std::string separator)
    : kg_(kg), separator_(std::move(separator)) {}

std::vector<EntityId> GoldOracleModel::Answers(std::string_view input) const {
  const auto segments = SplitSegments(input, separator_);
  std::string_view query = segments.front();
  if (!query.starts_with(kQueryHeader)) return {};
  query.remove_prefix(kQueryHeader.size());
  const auto split = SplitPair(query, [&](std::string_view l, std::string_view r) {
    return kg_.match_entity(l) && kg_.match_relation(r);
  });
  if (!split) return {};
  const auto source = kg_.match_entity(split->first);
  const auto relation = kg_.match_relation(split->second);
  if (!source || !relation) return {};
  return kg_.filter_set(*source, *relation);
}

std::vector<Sample> GoldOracleModel::DrawSamples(
    std::string_view input, std::size_t n, std::size_t /*max_new_tokens*/,
    std::optional<std::uint64_t> /*seed*/) {
  const auto answers = Answers(input);
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (answers.empty()) {
      out.push_back(Sample{"", 0.0});
    } else {
      out.push_back(Sample{std::string(kg_.entity_mention(answers[i % answers.size()])), 0.0});
    }
  }
  return out;
}

std::vector<double> GoldOracleModel::ScoreOutputs(
    std::string_view input, std::span<const std::string> outputs) {
  const auto answers = Answers(input);
  std::vector<double> out;
  for (const std::string& text : outputs) {
    const auto e = kg_.match_entity(text);
    const bool known = e && std::binary_search(answers.begin(), answers.end(), *e);
    out.push_back(known ? 0.0 : kNegInf);
  }
  return out;
}

std::size_t GoldOracleModel::CountTokens(std::string_view text) {
  return CountWhitespacePieces(text);
}

FixedOutputModel::FixedOutputModel(std::vector<Sample> cycle)
    : cycle_(std::move(cycle)) {
  if (cycle_.empty()) throw std::invalid_argument("FixedOutputModel needs samples");
}

std::vector<Sample> FixedOutputModel::DrawSamples(
    std::string_view /*input*/, std::size_t n, std::size_t /*max_new_tokens*/,
    std::optional<std::uint64_t> /*seed*/) {
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(cycle_[i % cycle_.size()]);
  return out;
}

std::vector<double> FixedOutputModel::ScoreOutputs(
    std::string_view /*input*/, std::span<const std::string> outputs) {
  std::vector<double> out;
  for (const std::string& text : outputs) {
    double best = kNegInf;
    for (const Sample& s : cycle_) {
      if (s.text == text) best = std::max(best, s.logprob);
    }
    out.push_back(best);
  }
  return out;
}

std::size_t FixedOutputModel::CountTokens(std::string_view text) {
  return CountWhitespacePieces(text);
}

}  // namespace ctxkgc
