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

#ifndef CTXKGC_SNAPSHOT_H_
#define CTXKGC_SNAPSHOT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ctxkgc/knowledge_graph.h"

namespace ctxkgc {

// Binary snapshot of the interned graph. Layout, all integers little-endian:
//
//   magic     8 bytes  "CTXKGCSN"
//   version   u32      kSnapshotVersion
//   sections  u32      count, then per section:
//     tag     4 bytes  ASCII
//     length  u64      payload bytes
//     payload
//
// Readers skip sections with unknown tags. Indexes are not stored; they are
// rebuilt on load.
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::string SerializeGraph(const GraphData& data);
GraphData DeserializeGraph(std::string_view bytes);

void WriteSnapshot(const KnowledgeGraph& kg, const std::filesystem::path& path);
KnowledgeGraph ReadSnapshot(const std::filesystem::path& path);

// 64-bit FNV-1a, used to fingerprint snapshots.
std::uint64_t Fingerprint(std::string_view bytes);

}  // namespace ctxkgc

#endif  // CTXKGC_SNAPSHOT_H_
