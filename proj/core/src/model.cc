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

#include "ctxkgc/model.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "ctxkgc/errors.h"

namespace ctxkgc {

std::optional<double> CandidateSet::score_of(EntityId e) const {
  for (const Candidate& c : entries) {
    if (c.entity == e) return c.logprob;
  }
  return std::nullopt;
}

CandidateSet GenerateCandidates(SequenceModel& model, std::string_view input,
                                const KnowledgeGraph& kg,
                                const CandidateOptions& options) {
  if (options.samples == 0) throw ConfigError("sample count must be at least 1");
  const std::vector<Sample> samples =
      model.DrawSamples(input, options.samples, options.max_new_tokens, options.seed);
  if (samples.size() != options.samples) {
    throw ProtocolError(fmt::format("requested {} samples, backend returned {}",
                                    options.samples, samples.size()));
  }

  CandidateSet out;
  std::unordered_map<EntityId, double> best;
  std::unordered_map<std::string, std::size_t> token_counts;
  for (const Sample& s : samples) {
    if (std::isnan(s.logprob) || s.logprob > 0.0) {
      throw ProtocolError(fmt::format("invalid sample logprob {}", s.logprob));
    }
    const auto entity = kg.match_entity(s.text);
    if (!entity || std::isinf(s.logprob)) {
      ++out.discarded_count;
      continue;
    }
    double score = s.logprob;
    if (options.length_normalize) {
      auto [it, inserted] = token_counts.try_emplace(s.text, 0);
      if (inserted) it->second = model.CountTokens(s.text);
      score /= static_cast<double>(std::max<std::size_t>(1, it->second));
    }
    auto [it, inserted] = best.try_emplace(*entity, score);
    if (!inserted) it->second = std::max(it->second, score);
  }

  out.entries.reserve(best.size());
  for (const auto& [entity, score] : best) out.entries.push_back({entity, score});
  std::sort(out.entries.begin(), out.entries.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.logprob != b.logprob) return a.logprob > b.logprob;
              return a.entity < b.entity;
            });
  return out;
}

}  // namespace ctxkgc
