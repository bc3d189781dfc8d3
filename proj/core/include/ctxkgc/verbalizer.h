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

#ifndef CTXKGC_VERBALIZER_H_
#define CTXKGC_VERBALIZER_H_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "ctxkgc/ids.h"
#include "ctxkgc/knowledge_graph.h"
#include "ctxkgc/random.h"
#include "ctxkgc/selector.h"

namespace ctxkgc {

// Counts model tokens in a text. Must be monotone under prefixes: counting a
// prefix never exceeds counting the whole text.
using TokenCounter = std::function<std::size_t(std::string_view)>;

// Approximate counter: one token per whitespace-separated piece.
std::size_t WhitespaceTokenCount(std::string_view text);

inline constexpr std::string_view kDefaultSeparator = "<SEP>";

struct VerbalizerOptions {
  bool use_descriptions = false;
  std::size_t budget = 512;
  std::string separator{kDefaultSeparator};
  TokenCounter counter = WhitespaceTokenCount;
};

struct VerbalizedInput {
  std::string text;
  std::size_t token_count = 0;
  bool truncated = false;
  std::size_t neighborhood_kept = 0;
  std::size_t relation_context_kept = 0;
  bool has_description = false;
};

// Renders
//
//   query: <head> | <relation>
//     [<SEP> description: <text>]
//     [<SEP> entity neighborhood: <r1> | <e1> <SEP> <r2> | <e2> ...]
//     [<SEP> relation context: <h1> | <t1> <SEP> <h2> | <t2> ...]
//
// on one line, segments joined by " <SEP> ". Empty segments are omitted.
// When over budget, whole items are dropped from the end (relation context
// first, then neighborhood); then the description loses trailing words. The
// query segment is never dropped. Throws DataError when the query segment
// alone exceeds the budget.
VerbalizedInput Verbalize(const KnowledgeGraph& kg, const Query& query,
                          const ContextBundle& bundle,
                          const VerbalizerOptions& options);

struct TrainingPair {
  std::string input;
  std::string output;
  // Context that produced `input`; item mentions point into the graph.
  ContextBundle bundle;
  VerbalizedInput verbalized;
};

// Builds one (input, output) pair for a directed query with known gold. The
// output is the gold entity's canonical mention.
TrainingPair RenderTrainingPair(const KnowledgeGraph& kg, const Query& query,
                                const SelectorConfig& selector,
                                const VerbalizerOptions& options, Rng& rng);

}  // namespace ctxkgc

#endif  // CTXKGC_VERBALIZER_H_
