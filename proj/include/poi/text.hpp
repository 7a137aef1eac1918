/*
 * Copyright 2026 The poiconflate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POI_TEXT_HPP
#define POI_TEXT_HPP

#include <string>
#include <vector>

namespace poi {

/// Canonical text form used everywhere strings are compared: Unicode NFC,
/// lowercased, outer whitespace trimmed, inner whitespace runs collapsed
/// to single spaces. Idempotent.
std::string normalize_text(const std::string& input);

/// Split on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_ws(const std::string& input);

/// Tokens are maximal runs of [A-Za-z0-9] or non-ASCII bytes; everything
/// else (punctuation, whitespace) separates tokens. Input is expected to
/// already be normalized.
std::vector<std::string> tokenize_alnum(const std::string& input);

/// Join tokens with single spaces.
std::string join_tokens(const std::vector<std::string>& tokens);

/// Levenshtein edit distance (unit costs).
std::size_t levenshtein(const std::string& a, const std::string& b);

/// True if every character is an ASCII digit (and string non-empty).
bool all_digits(const std::string& s);

}  // namespace poi

#endif  // POI_TEXT_HPP
