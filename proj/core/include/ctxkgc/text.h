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

#ifndef CTXKGC_TEXT_H_
#define CTXKGC_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctxkgc {

// Trims and collapses runs of ASCII whitespace into a single space.
std::string NormalizeWhitespace(std::string_view text);

// Key used to match generated text against mentions: whitespace-normalized
// and ASCII-lowercased. Non-ASCII bytes are compared verbatim.
std::string MatchKey(std::string_view text);

// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> SplitFields(std::string_view line, char delim);

// Number of maximal non-whitespace runs.
std::size_t CountWhitespacePieces(std::string_view text);

}  // namespace ctxkgc

#endif  // CTXKGC_TEXT_H_
