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

#include "ctxkgc/verbalizer.h"

#include <optional>
#include <vector>

#include <fmt/format.h>

#include "ctxkgc/errors.h"
#include "ctxkgc/text.h"

namespace ctxkgc {

std::size_t WhitespaceTokenCount(std::string_view text) {
  return CountWhitespacePieces(text);
}

namespace {

// Largest n in [lo, hi] with fits(n), assuming fits(lo) and monotonicity.
template <typename Fits>
std::size_t LargestFitting(std::size_t lo, std::size_t hi, Fits&& fits) {
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

std::string FirstWords(const std::vector<std::string_view>& words, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out.push_back(' ');
    out.append(words[i]);
  }
  return out;
}

}  // namespace

VerbalizedInput Verbalize(const KnowledgeGraph& kg, const Query& query,
                          const ContextBundle& bundle,
                          const VerbalizerOptions& options) {
  const TokenCounter& count =
      options.counter ? options.counter : TokenCounter(WhitespaceTokenCount);
  const std::string joiner = fmt::format(" {} ", options.separator);

  const std::string query_segment =
      fmt::format("query: {} | {}", kg.entity_mention(query.source),
                  kg.relation_mention(query.relation));
  if (count(query_segment) > options.budget) {
    throw DataError(fmt::format("query segment needs {} tokens, budget is {}",
                                count(query_segment), options.budget));
  }

  std::vector<std::string> items;
  items.reserve(bundle.neighborhood.size() + bundle.relation_context.size());
  for (std::size_t i = 0; i < bundle.neighborhood.size(); ++i) {
    const auto& n = bundle.neighborhood[i];
    items.push_back(fmt::format("{}{} | {}", i == 0 ? "entity neighborhood: " : "",
                                n.relation_mention, n.entity_mention));
  }
  for (std::size_t i = 0; i < bundle.relation_context.size(); ++i) {
    const auto& c = bundle.relation_context[i];
    items.push_back(fmt::format("{}{} | {}", i == 0 ? "relation context: " : "",
                                c.head_mention, c.tail_mention));
  }

  std::optional<std::string> description;
  if (options.use_descriptions) {
    if (const auto d = kg.description(query.source)) {
      description = fmt::format("description: {}", *d);
    }
  }

  const auto build = [&](const std::optional<std::string>& desc, std::size_t kept) {
    std::string text = query_segment;
    if (desc) {
      text += joiner;
      text += *desc;
    }
    for (std::size_t i = 0; i < kept; ++i) {
      text += joiner;
      text += items[i];
    }
    return text;
  };
  const auto fits = [&](const std::optional<std::string>& desc, std::size_t kept) {
    return count(build(desc, kept)) <= options.budget;
  };

  VerbalizedInput out;
  std::size_t kept = items.size();
  if (!fits(description, kept)) {
    out.truncated = true;
    if (description && !fits(description, 0)) {
      kept = 0;
      const std::string full(*kg.description(query.source));
      const auto words = SplitFields(full, ' ');
      const auto desc_with = [&](std::size_t n) {
        return std::optional<std::string>("description: " + FirstWords(words, n));
      };
      if (fits(desc_with(1), 0)) {
        const std::size_t n = LargestFitting(
            1, words.size(), [&](std::size_t w) { return fits(desc_with(w), 0); });
        description = desc_with(n);
      } else {
        description.reset();
      }
    } else {
      kept = LargestFitting(0, items.size(),
                            [&](std::size_t k) { return fits(description, k); });
    }
  }

  out.text = build(description, kept);
  out.token_count = count(out.text);
  out.has_description = description.has_value();
  out.neighborhood_kept = std::min(kept, bundle.neighborhood.size());
  out.relation_context_kept = kept - out.neighborhood_kept;
  return out;
}

TrainingPair RenderTrainingPair(const KnowledgeGraph& kg, const Query& query,
                                const SelectorConfig& selector,
                                const VerbalizerOptions& options, Rng& rng) {
  if (!query.gold) throw DataError("training query has no gold entity");
  TrainingPair pair;
  pair.bundle = SelectContext(kg, query, selector, rng);
  pair.verbalized = Verbalize(kg, query, pair.bundle, options);
  pair.input = pair.verbalized.text;
  pair.output = std::string(kg.entity_mention(*query.gold));
  return pair;
}

}  // namespace ctxkgc
