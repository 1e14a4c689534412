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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellrec/bm25.hpp"
#include "cellrec/notebook.hpp"
#include "cellrec/vector.hpp"

namespace cellrec {

enum class Method { Bm25, Bm25StemLemma, Vector };

/// bm25 | bm25-stemlemma | vector
std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);
Preprocess preprocess_for(Method method);

/// Corpus partition an index is built over. All holds every pair,
/// including pairs of Other-ranked authors.
enum class RankGroup { GrandMaster, Master, Expert, All };

std::string_view to_string(RankGroup group);
std::optional<RankGroup> parse_group(std::string_view text);
/// The per-rank group for an author rank; Other has none.
std::optional<RankGroup> group_of(AuthorRank rank);

/// Scores are only comparable within one method.
struct Recommendation {
    std::size_t rank = 0;  // 1-based
    std::string code;
    std::optional<std::string> matched_markdown;  // BM25 methods only
    double score = 0.0;
    Method method = Method::Bm25;
    std::string notebook_id;
    std::string pair_id;
};

struct QueryRequest {
    std::string markdown;
    Method method = Method::Bm25;
    std::size_t k = 10;
    RankGroup rank_group = RankGroup::All;
};

/// One index per (rank group, method).
class IndexSet {
public:
    void put(RankGroup group, Method method, Bm25Index index);
    void put(RankGroup group, VectorIndex index);

    const Bm25Index* bm25(RankGroup group, Method method) const;
    const VectorIndex* vector(RankGroup group) const;
    bool has(RankGroup group, Method method) const;

private:
    std::map<std::pair<RankGroup, Method>, Bm25Index> bm25_;
    std::map<RankGroup, VectorIndex> vector_;
};

/// BM25 methods match the query against indexed markdown and return each
/// match's paired code; Vector matches the query directly against code.
/// Throws Error(IndexMissing) when the (group, method) index is absent and
/// Error(InvalidArgument) for a blank query or k = 0. `provider` is only
/// used, and then required, for Method::Vector.
std::vector<Recommendation> recommend(const QueryRequest& req, const IndexSet& indexes,
                                      EmbeddingProvider* provider);

}  // namespace cellrec
