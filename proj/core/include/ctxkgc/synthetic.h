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

#ifndef CTXKGC_SYNTHETIC_H_
#define CTXKGC_SYNTHETIC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ctxkgc/ingest.h"

namespace ctxkgc {

// Shape of a generated dataset. Relations cycle through 1-1, 1-n, n-1 and
// n-n generators. Every entity and relation occurs in train, no triple is
// repeated within or across splits, so ingesting the files reproduces the
// requested counts exactly.
struct SyntheticSpec {
  std::size_t entities = 100;
  std::size_t relations = 8;
  std::size_t train = 400;
  std::size_t valid = 50;
  std::size_t test = 50;
  std::uint64_t seed = 1;
  bool descriptions = false;
  // Every k-th entity gets one extra alias; 0 disables aliases.
  std::size_t alias_every = 5;
};

struct SyntheticDataset {
  using RawTriple = std::array<std::string, 3>;

  std::array<std::vector<RawTriple>, 3> splits;
  std::vector<std::pair<std::string, std::vector<std::string>>> entity_mentions;
  std::vector<std::pair<std::string, std::string>> relation_mentions;
  std::vector<std::pair<std::string, std::string>> descriptions;
};

// Throws ConfigError when the counts cannot be met (e.g. too few train
// triples to touch every entity, or more triples than the generators allow).
SyntheticDataset GenerateSynthetic(const SyntheticSpec& spec);

// Writes train.txt, valid.txt, test.txt, entity_mentions.txt,
// relation_mentions.txt and (when present) descriptions.txt.
DatasetPaths WriteDataset(const SyntheticDataset& dataset,
                          const std::filesystem::path& dir);

}  // namespace ctxkgc

#endif  // CTXKGC_SYNTHETIC_H_
