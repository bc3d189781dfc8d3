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

#include "ctxkgc/snapshot.h"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "ctxkgc/errors.h"

namespace ctxkgc {
namespace {

constexpr std::string_view kMagic = "CTXKGCSN";
constexpr std::string_view kSource = "<snapshot>";

class ByteWriter {
 public:
  void U8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void Raw(std::string_view bytes) { out_.append(bytes); }
  void String(std::string_view s) {
    if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw DataError("string too long for snapshot");
    }
    U32(static_cast<std::uint32_t>(s.size()));
    Raw(s);
  }

  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : in_(bytes) {}

  std::uint8_t U8() { return static_cast<std::uint8_t>(Take(1)[0]); }
  std::uint32_t U32() {
    const auto b = Take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }
  std::uint64_t U64() {
    const auto b = Take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }
  std::string_view Take(std::size_t n) {
    if (n > in_.size()) throw ParseError(std::string(kSource), 0, "truncated snapshot");
    const auto out = in_.substr(0, n);
    in_.remove_prefix(n);
    return out;
  }
  std::string String() { return std::string(Take(U32())); }
  bool empty() const { return in_.empty(); }

 private:
  std::string_view in_;
};

void WriteSection(ByteWriter& out, std::string_view tag, const std::string& payload) {
  out.Raw(tag);
  out.U64(payload.size());
  out.Raw(payload);
}

std::string SplitTag(int i) { return fmt::format("SPL{}", i); }

}  // namespace

std::string SerializeGraph(const GraphData& data) {
  ByteWriter out;
  out.Raw(kMagic);
  out.U32(kSnapshotVersion);
  out.U32(6);

  {
    ByteWriter s;
    s.String(data.reciprocal_prefix);
    WriteSection(out, "PRFX", s.bytes());
  }
  {
    ByteWriter s;
    s.U32(static_cast<std::uint32_t>(data.entities.size()));
    for (const EntityRecord& e : data.entities) {
      s.String(e.key);
      s.U32(static_cast<std::uint32_t>(e.mentions.size()));
      for (const auto& m : e.mentions) s.String(m);
      s.U8(e.description ? 1 : 0);
      if (e.description) s.String(*e.description);
    }
    WriteSection(out, "ENTS", s.bytes());
  }
  {
    ByteWriter s;
    s.U32(static_cast<std::uint32_t>(data.relations.size()));
    for (const RelationRecord& r : data.relations) {
      s.String(r.key);
      s.String(r.mention);
    }
    WriteSection(out, "RELS", s.bytes());
  }
  for (int i = 0; i < 3; ++i) {
    ByteWriter s;
    s.U64(data.splits[i].size());
    for (const Triple& t : data.splits[i]) {
      s.U32(t.head.value);
      s.U32(t.relation.base());
      s.U32(t.tail.value);
    }
    WriteSection(out, SplitTag(i), s.bytes());
  }
  return std::move(out.bytes());
}

GraphData DeserializeGraph(std::string_view bytes) {
  const auto fail = [](const std::string& what) {
    return ParseError(std::string(kSource), 0, what);
  };
  ByteReader in(bytes);
  if (bytes.size() < kMagic.size() || in.Take(kMagic.size()) != kMagic) {
    throw fail("not a graph snapshot (bad magic)");
  }
  const std::uint32_t version = in.U32();
  if (version != kSnapshotVersion) {
    throw fail(fmt::format("unsupported snapshot version {}", version));
  }
  const std::uint32_t sections = in.U32();

  GraphData data;
  std::array<bool, 3> seen_split{};
  bool seen_entities = false;
  bool seen_relations = false;
  for (std::uint32_t i = 0; i < sections; ++i) {
    const std::string tag(in.Take(4));
    ByteReader s(in.Take(in.U64()));
    if (tag == "PRFX") {
      data.reciprocal_prefix = s.String();
    } else if (tag == "ENTS") {
      data.entities.resize(s.U32());
      for (EntityRecord& e : data.entities) {
        e.key = s.String();
        e.mentions.resize(s.U32());
        for (auto& m : e.mentions) m = s.String();
        if (s.U8() != 0) e.description = s.String();
      }
      seen_entities = true;
    } else if (tag.starts_with("SPL") && tag[3] >= '0' && tag[3] <= '2') {
      const int split = tag[3] - '0';
      auto& triples = data.splits[split];
      const std::uint64_t n = s.U64();
      if (n > bytes.size() / 12) throw fail("triple count exceeds snapshot size");
      triples.resize(n);
      for (Triple& t : triples) {
        t.head = EntityId{s.U32()};
        t.relation = RelationId::Base(s.U32());
        t.tail = EntityId{s.U32()};
      }
      seen_split[split] = true;
    } else if (tag == "RELS") {
      data.relations.resize(s.U32());
      for (RelationRecord& r : data.relations) {
        r.key = s.String();
        r.mention = s.String();
      }
      seen_relations = true;
    }
    // Unknown tags are skipped.
  }
  if (!seen_entities || !seen_relations || !seen_split[0] || !seen_split[1] ||
      !seen_split[2]) {
    throw fail("snapshot is missing a required section");
  }
  return data;
}

void WriteSnapshot(const KnowledgeGraph& kg, const std::filesystem::path& path) {
  const std::string bytes = SerializeGraph(kg.data());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(fmt::format("failed writing {}", path.string()));
}

KnowledgeGraph ReadSnapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    return KnowledgeGraph(DeserializeGraph(bytes));
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::uint64_t Fingerprint(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ctxkgc
