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

#include "ctxkgc/errors.h"

#include <utility>

#include <fmt/format.h>

namespace ctxkgc {

ParseError::ParseError(std::string path, std::size_t line,
                       const std::string& what)
    : DataError(line > 0 ? fmt::format("{}:{}: {}", path, line, what)
                         : fmt::format("{}: {}", path, what)),
      path_(std::move(path)),
      line_(line) {}

namespace {

std::string DescribeMissing(const std::string& kind,
                            const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 20;
  std::string listed;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
    if (i > 0) listed += ", ";
    listed += ids[i];
  }
  if (ids.size() > kShown) listed += fmt::format(", ... ({} more)", ids.size() - kShown);
  return fmt::format("{} {} id(s) have no mention: {}", ids.size(), kind, listed);
}

}  // namespace

MissingMentionError::MissingMentionError(std::string kind,
                                         std::vector<std::string> ids)
    : DataError(DescribeMissing(kind, ids)), ids_(std::move(ids)) {}

HttpStatusError::HttpStatusError(int status, const std::string& message)
    : BackendError(fmt::format("backend returned HTTP {}: {}", status, message)),
      status_(status) {}

}  // namespace ctxkgc
