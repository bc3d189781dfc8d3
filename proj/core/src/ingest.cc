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

#include "ctxkgc/ingest.h"

#include <fstream>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ctxkgc/errors.h"
#include "ctxkgc/text.h"

namespace ctxkgc {
namespace {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Calls fn(line_number, line) for every non-blank line.
void ForEachLine(const std::filesystem::path& path,
                 const std::function<void(std::size_t, std::string_view)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (Trim(view).empty()) continue;
    fn(line_no, view);
  }
}

class Interner {
 public:
  std::uint32_t Intern(std::string_view key) {
    const auto [it, inserted] =
        ids_.try_emplace(std::string(key), static_cast<std::uint32_t>(keys_.size()));
    if (inserted) keys_.emplace_back(key);
    return it->second;
  }
  std::optional<std::uint32_t> Find(const std::string& key) const {
    const auto it = ids_.find(key);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> keys_;
};

struct TripleReader {
  Interner entities;
  Interner relations;

  std::vector<Triple> Read(const std::filesystem::path& path,
                           std::size_t& duplicates) {
    std::vector<Triple> triples;
    std::unordered_set<Triple> seen;
    const std::string name = path.string();
    ForEachLine(path, [&](std::size_t line_no, std::string_view line) {
      const auto fields = SplitFields(line, '\t');
      if (fields.size() != 3) {
        throw ParseError(name, line_no,
                         fmt::format("expected 3 tab-separated columns, got {}",
                                     fields.size()));
      }
      const auto head = Trim(fields[0]);
      const auto rel = Trim(fields[1]);
      const auto tail = Trim(fields[2]);
      if (head.empty() || rel.empty() || tail.empty()) {
        throw ParseError(name, line_no, "empty id column");
      }
      const Triple t{EntityId{entities.Intern(head)},
                     RelationId::Base(relations.Intern(rel)),
                     EntityId{entities.Intern(tail)}};
      if (seen.insert(t).second) {
        triples.push_back(t);
      } else {
        ++duplicates;
      }
    });
    return triples;
  }
};

// id -> mentions, in file order; several rows for one id accumulate.
std::unordered_map<std::string, std::vector<std::string>> ReadMentionFile(
    const std::filesystem::path& path) {
  std::unordered_map<std::string, std::vector<std::string>> out;
  const std::string name = path.string();
  ForEachLine(path, [&](std::size_t line_no, std::string_view line) {
    const auto fields = SplitFields(line, '\t');
    if (fields.size() < 2) {
      throw ParseError(name, line_no, "expected <id>\\t<mention>");
    }
    const auto id = Trim(fields[0]);
    if (id.empty()) throw ParseError(name, line_no, "empty id column");
    auto& mentions = out[std::string(id)];
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::string mention = NormalizeWhitespace(fields[i]);
      if (!mention.empty()) mentions.push_back(std::move(mention));
    }
  });
  return out;
}

std::size_t CountOverlap(const std::vector<Triple>& a, const std::vector<Triple>& b) {
  const std::unordered_set<Triple> set(a.begin(), a.end());
  std::size_t n = 0;
  for (const Triple& t : b) n += set.count(t);
  return n;
}

}  // namespace

KnowledgeGraph Ingest(const DatasetPaths& paths, const IngestOptions& options,
                      IngestReport* report) {
  IngestReport local;
  IngestReport& rep = report ? *report : local;
  rep = IngestReport{};

  TripleReader reader;
  GraphData data;
  data.reciprocal_prefix = options.reciprocal_prefix;
  const std::filesystem::path* split_paths[] = {&paths.train, &paths.valid,
                                                &paths.test};
  for (Split s : kAllSplits) {
    const int i = static_cast<int>(s);
    data.splits[i] = reader.Read(*split_paths[i], rep.duplicates[i]);
    rep.triples[i] = data.splits[i].size();
    if (rep.duplicates[i] > 0) {
      spdlog::warn("{}: dropped {} duplicate triple(s)", SplitName(s),
                   rep.duplicates[i]);
    }
  }
  if (data.split(Split::kTrain).empty()) {
    throw DataError(fmt::format("train split {} is empty", paths.train.string()));
  }

  rep.train_valid_overlap =
      CountOverlap(data.split(Split::kTrain), data.split(Split::kValid));
  rep.train_test_overlap =
      CountOverlap(data.split(Split::kTrain), data.split(Split::kTest));
  rep.valid_test_overlap =
      CountOverlap(data.split(Split::kValid), data.split(Split::kTest));
  if (rep.train_valid_overlap + rep.train_test_overlap + rep.valid_test_overlap > 0) {
    spdlog::warn("splits overlap: train/valid {}, train/test {}, valid/test {}",
                 rep.train_valid_overlap, rep.train_test_overlap,
                 rep.valid_test_overlap);
  }

  const auto& entity_keys = reader.entities.keys();
  const auto& relation_keys = reader.relations.keys();
  data.entities.resize(entity_keys.size());
  data.relations.resize(relation_keys.size());

  if (paths.entity_mentions) {
    auto table = ReadMentionFile(*paths.entity_mentions);
    std::vector<std::string> missing;
    for (std::size_t e = 0; e < entity_keys.size(); ++e) {
      data.entities[e].key = entity_keys[e];
      auto it = table.find(entity_keys[e]);
      if (it == table.end() || it->second.empty()) {
        missing.push_back(entity_keys[e]);
        continue;
      }
      data.entities[e].mentions = std::move(it->second);
      table.erase(it);
    }
    if (!missing.empty()) throw MissingMentionError("entity", std::move(missing));
    rep.unused_mention_rows += table.size();
  } else {
    for (std::size_t e = 0; e < entity_keys.size(); ++e) {
      data.entities[e].key = entity_keys[e];
      data.entities[e].mentions = {entity_keys[e]};
    }
  }

  if (paths.relation_mentions) {
    auto table = ReadMentionFile(*paths.relation_mentions);
    std::vector<std::string> missing;
    for (std::size_t r = 0; r < relation_keys.size(); ++r) {
      data.relations[r].key = relation_keys[r];
      auto it = table.find(relation_keys[r]);
      if (it == table.end() || it->second.empty()) {
        missing.push_back(relation_keys[r]);
        continue;
      }
      data.relations[r].mention = std::move(it->second.front());
      table.erase(it);
    }
    if (!missing.empty()) throw MissingMentionError("relation", std::move(missing));
    rep.unused_mention_rows += table.size();
  } else {
    for (std::size_t r = 0; r < relation_keys.size(); ++r) {
      data.relations[r].key = relation_keys[r];
      data.relations[r].mention = relation_keys[r];
    }
  }

  if (paths.descriptions) {
    const std::string name = paths.descriptions->string();
    ForEachLine(*paths.descriptions, [&](std::size_t line_no, std::string_view line) {
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos) {
        throw ParseError(name, line_no, "expected <entity_id>\\t<description>");
      }
      const auto id = reader.entities.Find(std::string(Trim(line.substr(0, tab))));
      if (!id) {
        ++rep.unused_mention_rows;
        return;
      }
      std::string text = NormalizeWhitespace(line.substr(tab + 1));
      if (text.empty()) return;
      auto& slot = data.entities[*id].description;
      if (!slot) ++rep.descriptions;
      slot = std::move(text);
    });
  }

  rep.entities = data.entities.size();
  rep.relations = data.relations.size();
  return KnowledgeGraph(std::move(data));
}

}  // namespace ctxkgc
