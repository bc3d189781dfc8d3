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

// In-process SequenceModel implementations that need no neural weights.
// All of them are stateless apart from construction-time data, and their
// samples are a pure function of (input, n, seed).

#ifndef CTXKGC_MOCK_MODELS_H_
#define CTXKGC_MOCK_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxkgc/knowledge_graph.h"
#include "ctxkgc/model.h"
#include "ctxkgc/verbalizer.h"

namespace ctxkgc {

// Copies entities out of the relation-context segment of a verbalized input.
// Every head and tail mention found there is counted; an entity is emitted
// with probability count / total, and that probability's log is its
// logprob. With no relation context it is uniform over all entities.
class MockNeighborCopyModel final : public SequenceModel {
 public:
  explicit MockNeighborCopyModel(const KnowledgeGraph& kg,
                                 std::string separator = std::string(
                                     kDefaultSeparator));

  std::vector<Sample> DrawSamples(std::string_view input, std::size_t n,
                                  std::size_t max_new_tokens,
                                  std::optional<std::uint64_t> seed) override;
  std::vector<double> ScoreOutputs(
      std::string_view input, std::span<const std::string> outputs) override;
  std::size_t CountTokens(std::string_view text) override;
  std::string name() const override { return "mock-neighbor-copy"; }

  // Entity -> occurrence count in the relation-context segment.
  std::map<EntityId, std::size_t> ContextCounts(std::string_view input) const;

 private:
  const KnowledgeGraph& kg_;
  std::string separator_;
};

// Uniform over every entity, each with logprob -log(|E|).
class UniformRandomModel final : public SequenceModel {
 public:
  explicit UniformRandomModel(const KnowledgeGraph& kg);

  std::vector<Sample> DrawSamples(std::string_view input, std::size_t n,
                                  std::size_t max_new_tokens,
                                  std::optional<std::uint64_t> seed) override;
  std::vector<double> ScoreOutputs(
      std::string_view input, std::span<const std::string> outputs) override;
  std::size_t CountTokens(std::string_view text) override;
  std::string name() const override { return "mock-uniform"; }

 private:
  const KnowledgeGraph& kg_;
};

// Reads "query: <head> | <relation>" back out of the input and emits the
// known-true completions across all splits with logprob 0. Under filtered
// ranking every gold lands at rank 1.
class GoldOracleModel final : public SequenceModel {
 public:
  explicit GoldOracleModel(const KnowledgeGraph& kg,
                           std::string separator = std::string(
                               kDefaultSeparator));

  std::vector<Sample> DrawSamples(std::string_view input, std::size_t n,
                                  std::size_t max_new_tokens,
                                  std::optional<std::uint64_t> seed) override;
  std::vector<double> ScoreOutputs(
      std::string_view input, std::span<const std::string> outputs) override;
  std::size_t CountTokens(std::string_view text) override;
  std::string name() const override { return "mock-oracle"; }

 private:
  std::vector<EntityId> Answers(std::string_view input) const;

  const KnowledgeGraph& kg_;
  std::string separator_;
};

// Emits a fixed list of samples cyclically, ignoring the input.
class FixedOutputModel final : public SequenceModel {
 public:
  explicit FixedOutputModel(std::vector<Sample> cycle);

  std::vector<Sample> DrawSamples(std::string_view input, std::size_t n,
                                  std::size_t max_new_tokens,
                                  std::optional<std::uint64_t> seed) override;
  std::vector<double> ScoreOutputs(
      std::string_view input, std::span<const std::string> outputs) override;
  std::size_t CountTokens(std::string_view text) override;
  std::string name() const override { return "mock-fixed"; }

 private:
  std::vector<Sample> cycle_;
};

// Splits "query: A | R <SEP> ..." into its segments, trimming the separator
// padding.
std::vector<std::string_view> SplitSegments(std::string_view input,
                                            std::string_view separator);

}  // namespace ctxkgc

#endif  // CTXKGC_MOCK_MODELS_H_
