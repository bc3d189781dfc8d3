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

#ifndef CTXKGC_TOOLS_CLI_RUN_CONFIG_H_
#define CTXKGC_TOOLS_CLI_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "ctxkgc/evaluator.h"
#include "ctxkgc/ids.h"
#include "ctxkgc/ingest.h"
#include "ctxkgc/selector.h"

namespace ctxkgc::cli {

enum class BackendKind {
  kNeighborCopy,  // "mock-neighbor-copy"
  kUniform,       // "mock-uniform"
  kOracle,        // "mock-oracle"
  kRemote,        // "remote"
};

struct BackendConfig {
  BackendKind kind = BackendKind::kNeighborCopy;
  std::string url;
  std::size_t timeout_ms = 30000;
  std::size_t max_batch = 256;
  std::size_t max_new_tokens = 64;
  bool length_normalize = false;

  bool operator==(const BackendConfig&) const = default;
};

struct VerbalizerConfig {
  std::size_t budget = 512;
  bool use_descriptions = false;
  std::string separator = "<SEP>";
  // "whitespace" or "backend" (the model's tokenizer).
  std::string token_counter = "whitespace";

  bool operator==(const VerbalizerConfig&) const = default;
};

struct EvaluationConfig {
  Split split = Split::kTest;
  std::size_t sample_n = 500;
  Aggregation aggregation = Aggregation::kPooled;
  std::optional<std::size_t> max_queries;

  bool operator==(const EvaluationConfig&) const = default;
};

// Everything that affects results lives here; command-line flags only pick
// the command, the config file and ablation overrides.
struct RunConfig {
  DatasetPaths dataset;
  std::string reciprocal_prefix = "reverse of ";
  SelectorConfig selector;
  VerbalizerConfig verbalizer;
  BackendConfig backend;
  EvaluationConfig evaluation;
  // 0 = one per hardware thread.
  std::size_t workers = 0;
  std::filesystem::path output_dir = "out";
};

std::string_view BackendName(BackendKind kind);

// Relative paths in the file are resolved against `base_dir`. Unknown keys
// and ill-typed values raise ConfigError.
RunConfig RunConfigFromJson(const nlohmann::json& j,
                            const std::filesystem::path& base_dir);
nlohmann::json RunConfigToJson(const RunConfig& config);

RunConfig LoadRunConfig(const std::filesystem::path& path);

// The subset of the config that determines evaluation outputs.
nlohmann::json ResultAffectingJson(const RunConfig& config);

}  // namespace ctxkgc::cli

#endif  // CTXKGC_TOOLS_CLI_RUN_CONFIG_H_
