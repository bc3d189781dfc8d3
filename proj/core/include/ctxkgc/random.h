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

#ifndef CTXKGC_RANDOM_H_
#define CTXKGC_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace ctxkgc {

using Rng = std::mt19937_64;

// Independent streams so that results never depend on processing order.
enum class SeedStream : std::uint64_t {
  kTrainEmission = 1,
  kEvaluation = 2,
  kExplain = 3,
  kModelSampling = 4,
};

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for one query: a pure function of the run seed, the stream, a
// sub-stream discriminator (e.g. the split) and the query id.
constexpr std::uint64_t DeriveSeed(std::uint64_t global_seed, SeedStream stream,
                                   std::uint64_t substream,
                                   std::uint64_t query_id) {
  std::uint64_t h = SplitMix64(global_seed);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(stream));
  h = SplitMix64(h ^ substream);
  return SplitMix64(h ^ query_id);
}

// Uniform integer in [lo, hi].
inline std::size_t UniformIndex(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace ctxkgc

#endif  // CTXKGC_RANDOM_H_
