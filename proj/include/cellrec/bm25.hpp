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
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cellrec/notebook.hpp"
#include "cellrec/text.hpp"

namespace cellrec {

/// Okapi BM25 free parameters. Defaults follow Elasticsearch.
struct Bm25Params {
    double k1 = 1.2;  // term-frequency saturation
    double b = 0.75;  // length normalization strength, in [0, 1]

    bool operator==(const Bm25Params&) const = default;
};

enum class Preprocess : std::uint8_t { Plain, StemLemma };

/// Text analysis shared by indexing and querying: tokenize, then stem and
/// lemmatize for Preprocess::StemLemma.
TokenStream analyze(std::string_view text, Preprocess preprocess);

struct Posting {
    std::uint32_t doc = 0;  // ordinal into Bm25Index::documents()
    std::uint32_t term_freq = 0;

    bool operator==(const Posting&) const = default;
};

struct CorpusStats {
    std::size_t doc_count = 0;
    double avg_field_len = 0.0;
    std::vector<std::uint32_t> doc_len;  // by document ordinal
    std::unordered_map<std::string, std::uint32_t> doc_freq;
};

/// ln(1 + (N - n + 0.5) / (n + 0.5)), the non-negative variant used by
/// Lucene. Unseen terms have n = 0.
double idf(std::string_view term, const CorpusStats& stats);
double idf(std::size_t doc_count, std::size_t doc_freq);

struct ScoredPair {
    CellPair pair;
    double score = 0.0;
};

/// Inverted index over the markdown side of cell pairs. Immutable once built;
/// concurrent reads are safe.
///
/// Documents are stored in ascending pair_id order, so postings sorted by
/// ordinal are also sorted by pair_id.
class Bm25Index {
public:
    /// Throws Error(EmptyCorpus) for no pairs and Error(DuplicateDocId) when
    /// two pairs share a pair_id.
    static Bm25Index build(std::span<const CellPair> pairs, Bm25Params params = {},
                           Preprocess preprocess = Preprocess::Plain);

    /// Sum over query tokens, with multiplicity, of
    /// IDF(q) * f(q,D) * (k1 + 1) / (f(q,D) + k1 * (1 - b + b * len(D) / avgLen)).
    /// Throws Error(UnknownDoc) if doc_id is not indexed.
    double score(const TokenStream& query, std::string_view doc_id) const;

    /// Highest-scoring documents, score descending then pair_id ascending.
    /// Documents scoring zero are never returned.
    std::vector<ScoredPair> top_k(const TokenStream& query, std::size_t k) const;

    const Bm25Params& params() const noexcept { return params_; }
    Preprocess preprocess() const noexcept { return preprocess_; }
    const CorpusStats& stats() const noexcept { return stats_; }
    const std::vector<CellPair>& documents() const noexcept { return docs_; }
    std::size_t size() const noexcept { return docs_.size(); }

    /// Postings for `term`, or an empty span.
    std::span<const Posting> postings(std::string_view term) const;
    std::size_t term_count() const noexcept { return postings_.size(); }
    bool contains(std::string_view doc_id) const;

    void save(std::ostream& out) const;
    /// Throws Error(CorruptIndex) on malformed input.
    static Bm25Index load(std::istream& in);

private:
    Bm25Index() = default;

    double term_weight(double idf_value, std::uint32_t tf, std::uint32_t doc_len) const;
    void finalize_lookup();

    Bm25Params params_;
    Preprocess preprocess_ = Preprocess::Plain;
    CorpusStats stats_;
    std::vector<CellPair> docs_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::uint32_t> ordinal_by_id_;
};

}  // namespace cellrec
