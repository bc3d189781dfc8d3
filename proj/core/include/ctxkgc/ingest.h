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

#ifndef CTXKGC_INGEST_H_
#define CTXKGC_INGEST_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "ctxkgc/knowledge_graph.h"

namespace ctxkgc {

// Dataset layout:
//   triple files       <head_id>\t<relation_id>\t<tail_id>
//   mention files      <id>\t<mention>[\t<alias>...]
//   description file   <entity_id>\t<text>
// When a mention file is omitted the raw id doubles as the mention.
struct DatasetPaths {
  std::filesystem::path train;
  std::filesystem::path valid;
  std::filesystem::path test;
  std::optional<std::filesystem::path> entity_mentions;
  std::optional<std::filesystem::path> relation_mentions;
  std::optional<std::filesystem::path> descriptions;
};

struct IngestOptions {
  std::string reciprocal_prefix{kDefaultReciprocalPrefix};
};

struct IngestReport {
  std::size_t entities = 0;
  std::size_t relations = 0;
  // Distinct triples per split, indexed by Split.
  std::array<std::size_t, 3> triples{};
  // Repeated lines dropped within each split.
  std::array<std::size_t, 3> duplicates{};
  std::size_t train_valid_overlap = 0;
  std::size_t train_test_overlap = 0;
  std::size_t valid_test_overlap = 0;
  // Mention/description rows naming ids that no triple uses.
  std::size_t unused_mention_rows = 0;
  std::size_t descriptions = 0;
};

// Reads the dataset files and builds the indexed graph. Entities and
// relations are interned in order of first appearance across train, valid,
// test. Throws ParseError, MissingMentionError or DataError.
KnowledgeGraph Ingest(const DatasetPaths& paths,
                      const IngestOptions& options = {},
                      IngestReport* report = nullptr);

}  // namespace ctxkgc

#endif  // CTXKGC_INGEST_H_
