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

#include "run_config.h"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "ctxkgc/errors.h"

namespace ctxkgc::cli {

using json = nlohmann::json;

namespace {

// Reads typed fields out of one JSON object and rejects unknown keys.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("'{}' must be an object", name_));
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) {
        throw ConfigError(fmt::format("unknown key '{}{}'", Prefix(), key));
      }
    }
  }

  template <typename T>
  void Get(const char* key, T& out) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("'{}{}' has the wrong type", Prefix(), key));
    }
  }

  void GetPath(const char* key, std::filesystem::path& out,
               const std::filesystem::path& base) {
    std::string s;
    Get(key, s);
    if (!s.empty()) out = Resolve(s, base);
  }

  void GetOptionalPath(const char* key, std::optional<std::filesystem::path>& out,
                       const std::filesystem::path& base) {
    std::string s;
    Get(key, s);
    out = s.empty() ? std::nullopt : std::optional(Resolve(s, base));
  }

  const json* Child(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string Prefix() const { return name_.empty() ? "" : name_ + "."; }

 private:
  static std::filesystem::path Resolve(const std::string& s,
                                       const std::filesystem::path& base) {
    std::filesystem::path p(s);
    return p.is_absolute() ? p : base / p;
  }

  const json& j_;
  std::string name_;
  std::set<std::string> used_;
};

std::string PathString(const std::filesystem::path& p) { return p.string(); }

json OptionalPath(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

}  // namespace

std::string_view BackendName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kNeighborCopy:
      return "mock-neighbor-copy";
    case BackendKind::kUniform:
      return "mock-uniform";
    case BackendKind::kOracle:
      return "mock-oracle";
    case BackendKind::kRemote:
      return "remote";
  }
  return "?";
}

RunConfig RunConfigFromJson(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  Section root(j, "");
  if (const json* d = root.Child("dataset")) {
    Section s(*d, "dataset");
    s.GetPath("train", c.dataset.train, base_dir);
    s.GetPath("valid", c.dataset.valid, base_dir);
    s.GetPath("test", c.dataset.test, base_dir);
    s.GetOptionalPath("entity_mentions", c.dataset.entity_mentions, base_dir);
    s.GetOptionalPath("relation_mentions", c.dataset.relation_mentions, base_dir);
    s.GetOptionalPath("descriptions", c.dataset.descriptions, base_dir);
    s.Get("reciprocal_prefix", c.reciprocal_prefix);
  }
  std::uint64_t seed = 0;
  root.Get("seed", seed);
  c.selector.seed = seed;
  if (const json* d = root.Child("selector")) {
    Section s(*d, "selector");
    s.Get("neighborhood_cap", c.selector.neighborhood_cap);
    s.Get("relation_cap", c.selector.relation_cap);
    s.Get("cardinality_threshold", c.selector.cardinality_threshold);
    std::string strategy(StrategyName(c.selector.strategy));
    s.Get("strategy", strategy);
    const auto parsed = ParseStrategy(strategy);
    if (!parsed) throw ConfigError(fmt::format("unknown selector.strategy '{}'", strategy));
    c.selector.strategy = *parsed;
  }
  if (const json* d = root.Child("verbalizer")) {
    Section s(*d, "verbalizer");
    s.Get("budget", c.verbalizer.budget);
    s.Get("use_descriptions", c.verbalizer.use_descriptions);
    s.Get("separator", c.verbalizer.separator);
    s.Get("token_counter", c.verbalizer.token_counter);
    if (c.verbalizer.token_counter != "whitespace" && c.verbalizer.token_counter != "backend") {
      throw ConfigError("verbalizer.token_counter must be 'whitespace' or 'backend'");
    }
  }
  if (const json* d = root.Child("backend")) {
    Section s(*d, "backend");
    std::string kind(BackendName(c.backend.kind));
    s.Get("kind", kind);
    bool found = false;
    for (auto k : {BackendKind::kNeighborCopy, BackendKind::kUniform, BackendKind::kOracle,
                   BackendKind::kRemote}) {
      if (BackendName(k) == kind) {
        c.backend.kind = k;
        found = true;
      }
    }
    if (!found) throw ConfigError(fmt::format("unknown backend.kind '{}'", kind));
    s.Get("url", c.backend.url);
    s.Get("timeout_ms", c.backend.timeout_ms);
    s.Get("max_batch", c.backend.max_batch);
    s.Get("max_new_tokens", c.backend.max_new_tokens);
    s.Get("length_normalize", c.backend.length_normalize);
    if (c.backend.kind == BackendKind::kRemote && c.backend.url.empty()) {
      throw ConfigError("backend.url is required for the remote backend");
    }
  }
  if (const json* d = root.Child("evaluation")) {
    Section s(*d, "evaluation");
    std::string split(SplitName(c.evaluation.split));
    s.Get("split", split);
    const auto parsed_split = ParseSplit(split);
    if (!parsed_split) throw ConfigError(fmt::format("unknown evaluation.split '{}'", split));
    c.evaluation.split = *parsed_split;
    s.Get("sample_n", c.evaluation.sample_n);
    if (c.evaluation.sample_n == 0) throw ConfigError("evaluation.sample_n must be >= 1");
    std::string aggregation(AggregationName(c.evaluation.aggregation));
    s.Get("aggregation", aggregation);
    const auto parsed_agg = ParseAggregation(aggregation);
    if (!parsed_agg) {
      throw ConfigError(fmt::format("unknown evaluation.aggregation '{}'", aggregation));
    }
    c.evaluation.aggregation = *parsed_agg;
    std::size_t max_queries = 0;
    s.Get("max_queries", max_queries);
    if (max_queries > 0) c.evaluation.max_queries = max_queries;
  }
  root.Get("workers", c.workers);
  std::string output_dir;
  root.Get("output_dir", output_dir);
  if (!output_dir.empty()) {
    const std::filesystem::path p(output_dir);
    c.output_dir = p.is_absolute() ? p : base_dir / p;
  } else {
    c.output_dir = base_dir / "out";
  }
  c.selector.Validate();
  return c;
}

json RunConfigToJson(const RunConfig& c) {
  return json{
      {"dataset",
       {{"train", PathString(c.dataset.train)},
        {"valid", PathString(c.dataset.valid)},
        {"test", PathString(c.dataset.test)},
        {"entity_mentions", OptionalPath(c.dataset.entity_mentions)},
        {"relation_mentions", OptionalPath(c.dataset.relation_mentions)},
        {"descriptions", OptionalPath(c.dataset.descriptions)},
        {"reciprocal_prefix", c.reciprocal_prefix}}},
      {"seed", c.selector.seed},
      {"selector",
       {{"neighborhood_cap", c.selector.neighborhood_cap},
        {"relation_cap", c.selector.relation_cap},
        {"strategy", StrategyName(c.selector.strategy)},
        {"cardinality_threshold", c.selector.cardinality_threshold}}},
      {"verbalizer",
       {{"budget", c.verbalizer.budget},
        {"use_descriptions", c.verbalizer.use_descriptions},
        {"separator", c.verbalizer.separator},
        {"token_counter", c.verbalizer.token_counter}}},
      {"backend",
       {{"kind", BackendName(c.backend.kind)},
        {"url", c.backend.url},
        {"timeout_ms", c.backend.timeout_ms},
        {"max_batch", c.backend.max_batch},
        {"max_new_tokens", c.backend.max_new_tokens},
        {"length_normalize", c.backend.length_normalize}}},
      {"evaluation",
       {{"split", SplitName(c.evaluation.split)},
        {"sample_n", c.evaluation.sample_n},
        {"aggregation", AggregationName(c.evaluation.aggregation)},
        {"max_queries", c.evaluation.max_queries ? json(*c.evaluation.max_queries)
                                                 : json(nullptr)}}},
      {"workers", c.workers},
      {"output_dir", PathString(c.output_dir)},
  };
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError(fmt::format("{} is not valid JSON", path.string()));
  return RunConfigFromJson(j, std::filesystem::absolute(path).parent_path());
}

json ResultAffectingJson(const RunConfig& config) {
  json j = RunConfigToJson(config);
  j.erase("workers");
  j.erase("output_dir");
  j["backend"].erase("timeout_ms");
  return j;
}

}  // namespace ctxkgc::cli
