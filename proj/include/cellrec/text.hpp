// Copyright 2026 The cellrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cellrec {

/// Normalized tokens of one field, in document order.
struct TokenStream {
    std::vector<std::string> tokens;

    std::size_t field_len() const noexcept { return tokens.size(); }

    bool operator==(const TokenStream&) const = default;
};

/// Lowercases and splits on every code point that is not a Unicode letter or
/// digit. Invalid UTF-8 bytes act as separators. No stopword removal.
TokenStream tokenize(std::string_view text);

/// Porter's stemming algorithm, as in the author's reference C release
/// (words of one or two letters are returned unchanged). Tokens containing
/// anything other than ASCII a-z are returned unchanged.
std::string porter_stem(std::string_view word);

/// Finite form -> lemma lookup for irregular English forms.
class LemmaTable {
public:
    /// The table compiled into the library from resources/lemmas.tsv.
    static const LemmaTable& builtin();

    /// Parses `form<TAB>lemma` lines. Blank lines and lines starting with
    /// '#' are ignored.
    static LemmaTable parse(std::string_view tsv);

    /// Returns the lemma, or `form` itself when the table has no entry.
    std::string_view lookup(std::string_view form) const;

    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::unordered_map<std::string, std::string> entries_;
};

/// Lemmatizes each token via `table`, then Porter-stems it. Count and order
/// are preserved.
TokenStream stem_and_lemmatize(const TokenStream& ts, const LemmaTable& table = LemmaTable::builtin());

}  // namespace cellrec
