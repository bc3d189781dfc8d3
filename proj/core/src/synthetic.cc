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

#include "ctxkgc/synthetic.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ctxkgc/errors.h"
#include "ctxkgc/random.h"

namespace ctxkgc {
namespace {

enum class Shape { kOneToOne, kOneToMany, kManyToOne, kManyToMany };

struct RelationGen {
  Shape shape;
  std::vector<std::uint32_t> heads;  // head pool (1-n, n-n)
  std::vector<std::uint32_t> tails;  // tail pool (n-1, n-n)
  std::vector<std::uint32_t> image;  // bijection (1-1)
};

std::vector<std::uint32_t> Subset(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[UniformIndex(rng, i, n - 1)]);
  all.resize(k);
  return all;
}

std::uint32_t Pick(const std::vector<std::uint32_t>& pool, Rng& rng) {
  return pool[UniformIndex(rng, 0, pool.size() - 1)];
}

class Generator {
 public:
  explicit Generator(const SyntheticSpec& spec) : spec_(spec), rng_(spec.seed) {
    const std::size_t n = spec.entities;
    for (std::size_t r = 0; r < spec.relations; ++r) {
      RelationGen g{static_cast<Shape>(r % 4), {}, {}, {}};
      switch (g.shape) {
        case Shape::kOneToOne:
          g.image = Subset(n, n, rng_);
          break;
        case Shape::kOneToMany:
          g.heads = Subset(n, std::max<std::size_t>(1, n / 10), rng_);
          break;
        case Shape::kManyToOne:
          g.tails = Subset(n, std::max<std::size_t>(1, n / 10), rng_);
          break;
        case Shape::kManyToMany:
          g.heads = Subset(n, std::max<std::size_t>(2, n / 8), rng_);
          g.tails = Subset(n, std::max<std::size_t>(2, n / 8), rng_);
          break;
      }
      gens_.push_back(std::move(g));
    }
  }

  SyntheticDataset Run() {
    SyntheticDataset out;
    auto& train = out.splits[0];
    std::vector<bool> covered(spec_.entities, false);
    const auto emit = [&](std::vector<SyntheticDataset::RawTriple>& split,
                          std::uint32_t h, std::uint32_t r, std::uint32_t t) {
      if (!seen_.insert(Key(h, r, t)).second) return false;
      split.push_back({fmt::format("e{}", h), fmt::format("r{}", r), fmt::format("e{}", t)});
      covered[h] = covered[t] = true;
      return true;
    };

    // One triple per relation, then one per still-uncovered entity.
    for (std::uint32_t r = 0; r < spec_.relations; ++r) {
      while (true) {
        const auto [h, t] = Draw(r);
        if (emit(train, h, r, t)) break;
      }
    }
    for (std::uint32_t e = 0; e < spec_.entities; ++e) {
      if (covered[e]) continue;
      bool placed = false;
      for (std::size_t attempt = 0; attempt < 4 * spec_.relations && !placed; ++attempt) {
        const auto r = static_cast<std::uint32_t>((e + attempt) % spec_.relations);
        if (const auto pair = Place(r, e)) placed = emit(train, pair->first, r, pair->second);
      }
      if (!placed) throw ConfigError(fmt::format("cannot place entity {}", e));
    }
    if (train.size() > spec_.train) {
      throw ConfigError(fmt::format(
          "{} train triples are too few to cover {} entities and {} relations",
          spec_.train, spec_.entities, spec_.relations));
    }

    const std::size_t wanted[] = {spec_.train, spec_.valid, spec_.test};
    for (int s = 0; s < 3; ++s) {
      auto& split = out.splits[s];
      std::size_t failures = 0;
      while (split.size() < wanted[s]) {
        const auto r = static_cast<std::uint32_t>(UniformIndex(rng_, 0, spec_.relations - 1));
        const auto [h, t] = Draw(r);
        if (emit(split, h, r, t)) {
          failures = 0;
        } else if (++failures > 100000) {
          throw ConfigError("synthetic graph is saturated; lower the triple counts");
        }
      }
    }

    for (std::size_t e = 0; e < spec_.entities; ++e) {
      std::vector<std::string> mentions{fmt::format("entity {}", e)};
      if (spec_.alias_every > 0 && e % spec_.alias_every == 0) {
        mentions.push_back(fmt::format("ent-{}", e));
      }
      out.entity_mentions.emplace_back(fmt::format("e{}", e), std::move(mentions));
      if (spec_.descriptions) {
        out.descriptions.emplace_back(fmt::format("e{}", e),
                                      fmt::format("synthetic entity number {}", e));
      }
    }
    for (std::size_t r = 0; r < spec_.relations; ++r) {
      out.relation_mentions.emplace_back(fmt::format("r{}", r), fmt::format("relation {}", r));
    }
    return out;
  }

 private:
  std::uint64_t Key(std::uint32_t h, std::uint32_t r, std::uint32_t t) const {
    const std::uint64_t n = spec_.entities;
    return (static_cast<std::uint64_t>(h) * spec_.relations + r) * n + t;
  }

  std::pair<std::uint32_t, std::uint32_t> Draw(std::uint32_t r) {
    const RelationGen& g = gens_[r];
    const auto any = [&] {
      return static_cast<std::uint32_t>(UniformIndex(rng_, 0, spec_.entities - 1));
    };
    switch (g.shape) {
      case Shape::kOneToOne: {
        const auto h = any();
        return {h, g.image[h]};
      }
      case Shape::kOneToMany:
        return {Pick(g.heads, rng_), any()};
      case Shape::kManyToOne:
        return {any(), Pick(g.tails, rng_)};
      case Shape::kManyToMany:
        return {Pick(g.heads, rng_), Pick(g.tails, rng_)};
    }
    return {0, 0};
  }

  // A triple of relation r that touches entity e, if the shape allows one.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> Place(std::uint32_t r,
                                                               std::uint32_t e) {
    const RelationGen& g = gens_[r];
    switch (g.shape) {
      case Shape::kOneToOne:
        return std::pair{e, g.image[e]};
      case Shape::kOneToMany:
        return std::pair{Pick(g.heads, rng_), e};
      case Shape::kManyToOne:
        return std::pair{e, Pick(g.tails, rng_)};
      case Shape::kManyToMany:
        return std::nullopt;
    }
    return std::nullopt;
  }

  const SyntheticSpec& spec_;
  Rng rng_;
  std::vector<RelationGen> gens_;
  std::unordered_set<std::uint64_t> seen_;
};

void WriteLines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  for (const auto& line : lines) out << line << '\n';
}

}  // namespace

SyntheticDataset GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.entities < 2 || spec.relations == 0) {
    throw ConfigError("synthetic graph needs at least 2 entities and 1 relation");
  }
  return Generator(spec).Run();
}

DatasetPaths WriteDataset(const SyntheticDataset& dataset,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  DatasetPaths paths;
  paths.train = dir / "train.txt";
  paths.valid = dir / "valid.txt";
  paths.test = dir / "test.txt";
  const std::filesystem::path* split_paths[] = {&paths.train, &paths.valid, &paths.test};
  for (int s = 0; s < 3; ++s) {
    std::vector<std::string> lines;
    for (const auto& t : dataset.splits[s]) lines.push_back(fmt::format("{}\t{}\t{}", t[0], t[1], t[2]));
    WriteLines(*split_paths[s], lines);
  }

  std::vector<std::string> lines;
  for (const auto& [id, mentions] : dataset.entity_mentions) {
    lines.push_back(fmt::format("{}\t{}", id, fmt::join(mentions, "\t")));
  }
  paths.entity_mentions = dir / "entity_mentions.txt";
  WriteLines(*paths.entity_mentions, lines);

  lines.clear();
  for (const auto& [id, mention] : dataset.relation_mentions) {
    lines.push_back(fmt::format("{}\t{}", id, mention));
  }
  paths.relation_mentions = dir / "relation_mentions.txt";
  WriteLines(*paths.relation_mentions, lines);

  if (!dataset.descriptions.empty()) {
    lines.clear();
    for (const auto& [id, text] : dataset.descriptions) {
      lines.push_back(fmt::format("{}\t{}", id, text));
    }
    paths.descriptions = dir / "descriptions.txt";
    WriteLines(*paths.descriptions, lines);
  }
  return paths;
}

}  // namespace ctxkgc
