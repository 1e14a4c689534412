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

#include "cellrec/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace cellrec {

namespace detail {
// Generated at build time from resources/lemmas.tsv.
extern const char* const kBuiltinLemmaTsv;
}  // namespace detail

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    std::string current;
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int32_t>(text.size());
    std::int32_t offset = 0;
    while (offset < length) {
        UChar32 cp = 0;
        U8_NEXT(bytes, offset, length, cp);
        if (cp >= 0 && u_isalnum(cp)) {
            const UChar32 lower = u_tolower(cp);
            std::uint8_t buf[U8_MAX_LENGTH];
            std::int32_t n = 0;
            U8_APPEND_UNSAFE(buf, n, lower);
            current.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
        } else if (!current.empty()) {
            out.tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.tokens.push_back(std::move(current));
    return out;
}

const LemmaTable& LemmaTable::builtin() {
    static const LemmaTable table = parse(detail::kBuiltinLemmaTsv);
    return table;
}

LemmaTable LemmaTable::parse(std::string_view tsv) {
    LemmaTable table;
    std::size_t start = 0;
    while (start < tsv.size()) {
        std::size_t end = tsv.find('\n', start);
        if (end == std::string_view::npos) end = tsv.size();
        std::string_view line = tsv.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size()) continue;
        table.entries_.insert_or_assign(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
    }
    return table;
}

std::string_view LemmaTable::lookup(std::string_view form) const {
    const auto it = entries_.find(std::string(form));
    return it == entries_.end() ? form : std::string_view(it->second);
}

TokenStream stem_and_lemmatize(const TokenStream& ts, const LemmaTable& table) {
    TokenStream out;
    out.tokens.reserve(ts.tokens.size());
    for (const auto& token : ts.tokens) {
        std::string stemmed = porter_stem(table.lookup(token));
        out.tokens.push_back(stemmed.empty() ? token : std::move(stemmed));
    }
    return out;
}

}  // namespace cellrec
