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

#ifndef CTXKGC_MODEL_H_
#define CTXKGC_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxkgc/ids.h"
#include "ctxkgc/knowledge_graph.h"

namespace ctxkgc {

// One decoded sequence and its natural-log likelihood (<= 0).
struct Sample {
  std::string text;
  double logprob = 0.0;

  bool operator==(const Sample&) const = default;
};

// Contract for a text-to-text model. Implementations must tolerate
// concurrent calls.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  // Exactly `n` samples; duplicates allowed. With a seed, the result is a
  // pure function of (input, n, max_new_tokens, seed).
  virtual std::vector<Sample> DrawSamples(
      std::string_view input, std::size_t n, std::size_t max_new_tokens,
      std::optional<std::uint64_t> seed) = 0;

  // Log-likelihood of each output given the input.
  virtual std::vector<double> ScoreOutputs(
      std::string_view input, std::span<const std::string> outputs) = 0;

  virtual std::size_t CountTokens(std::string_view text) = 0;

  virtual std::string name() const = 0;
};

struct Candidate {
  EntityId entity;
  double logprob = 0.0;

  bool operator==(const Candidate&) const = default;
};

// Distinct entities decoded for one query, ordered by logprob descending
// then entity id.
struct CandidateSet {
  std::vector<Candidate> entries;
  // Samples whose text matched no entity mention.
  std::size_t discarded_count = 0;

  std::optional<double> score_of(EntityId e) const;
};

struct CandidateOptions {
  std::size_t samples = 500;
  std::size_t max_new_tokens = 64;
  // Divide each sequence logprob by its token count (model tokenizer).
  bool length_normalize = false;
  std::optional<std::uint64_t> seed;
};

// Samples the model, maps each text to an entity through the alias table,
// drops unmatched texts and keeps the maximum logprob per entity. Throws
// ProtocolError on a positive or NaN logprob or a wrong sample count.
CandidateSet GenerateCandidates(SequenceModel& model, std::string_view input,
                                const KnowledgeGraph& kg,
                                const CandidateOptions& options);

}  // namespace ctxkgc

#endif  // CTXKGC_MODEL_H_
