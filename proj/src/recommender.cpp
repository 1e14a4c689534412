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

#include "cellrec/recommender.hpp"

#include <algorithm>

#include "cellrec/error.hpp"

namespace cellrec {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c); });
    return out;
}

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Bm25: return "bm25";
        case Method::Bm25StemLemma: return "bm25-stemlemma";
        case Method::Vector: return "vector";
    }
    return "bm25";
}

std::optional<Method> parse_method(std::string_view text) {
    const auto s = lower(text);
    if (s == "bm25") return Method::Bm25;
    if (s == "bm25-stemlemma") return Method::Bm25StemLemma;
    if (s == "vector") return Method::Vector;
    return std::nullopt;
}

Preprocess preprocess_for(Method method) {
    return method == Method::Bm25StemLemma ? Preprocess::StemLemma : Preprocess::Plain;
}

std::string_view to_string(RankGroup group) {
    switch (group) {
        case RankGroup::GrandMaster: return "grandmaster";
        case RankGroup::Master: return "master";
        case RankGroup::Expert: return "expert";
        case RankGroup::All: return "all";
    }
    return "all";
}

std::optional<RankGroup> parse_group(std::string_view text) {
    const auto s = lower(text);
    if (s == "grandmaster") return RankGroup::GrandMaster;
    if (s == "master") return RankGroup::Master;
    if (s == "expert") return RankGroup::Expert;
    if (s == "all") return RankGroup::All;
    return std::nullopt;
}

std::optional<RankGroup> group_of(AuthorRank rank) {
    switch (rank) {
        case AuthorRank::GrandMaster: return RankGroup::GrandMaster;
        case AuthorRank::Master: return RankGroup::Master;
        case AuthorRank::Expert: return RankGroup::Expert;
        case AuthorRank::Other: return std::nullopt;
    }
    return std::nullopt;
}

void IndexSet::put(RankGroup group, Method method, Bm25Index index) {
    if (method == Method::Vector) throw Error(ErrorKind::InvalidArgument, "BM25 index stored under vector method");
    bm25_.insert_or_assign({group, method}, std::move(index));
}

void IndexSet::put(RankGroup group, VectorIndex index) { vector_.insert_or_assign(group, std::move(index)); }

const Bm25Index* IndexSet::bm25(RankGroup group, Method method) const {
    const auto it = bm25_.find({group, method});
    return it == bm25_.end() ? nullptr : &it->second;
}

const VectorIndex* IndexSet::vector(RankGroup group) const {
    const auto it = vector_.find(group);
    return it == vector_.end() ? nullptr : &it->second;
}

bool IndexSet::has(RankGroup group, Method method) const {
    return method == Method::Vector ? vector(group) != nullptr : bm25(group, method) != nullptr;
}

std::vector<Recommendation> recommend(const QueryRequest& req, const IndexSet& indexes,
                                      EmbeddingProvider* provider) {
    if (is_blank(req.markdown)) throw Error(ErrorKind::InvalidArgument, "query markdown is blank");
    if (req.k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
    if (!indexes.has(req.rank_group, req.method)) {
        throw Error(ErrorKind::IndexMissing, "no " + std::string(to_string(req.method)) + " index for group " +
                                                 std::string(to_string(req.rank_group)));
    }

    std::vector<ScoredPair> hits;
    if (req.method == Method::Vector) {
        if (provider == nullptr) throw Error(ErrorKind::InvalidArgument, "vector queries need an embedding provider");
        hits = indexes.vector(req.rank_group)->top_k(req.markdown, *provider, req.k);
    } else {
        const Bm25Index* ix = indexes.bm25(req.rank_group, req.method);
        hits = ix->top_k(analyze(req.markdown, ix->preprocess()), req.k);
    }

    std::vector<Recommendation> out;
    out.reserve(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        auto& hit = hits[i];
        Recommendation r;
        r.rank = i + 1;
        r.code = std::move(hit.pair.code);
        if (req.method != Method::Vector) r.matched_markdown = std::move(hit.pair.markdown);
        r.score = hit.score;
        r.method = req.method;
        r.notebook_id = std::move(hit.pair.notebook_id);
        r.pair_id = std::move(hit.pair.pair_id);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace cellrec
