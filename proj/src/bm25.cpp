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

#include "cellrec/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "cellrec/container.hpp"
#include "cellrec/error.hpp"

namespace cellrec {

namespace {

void validate(const Bm25Params& p) {
    if (!std::isfinite(p.k1) || p.k1 < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "k1 must be a finite non-negative number");
    }
    if (!std::isfinite(p.b) || p.b < 0.0 || p.b > 1.0) {
        throw Error(ErrorKind::InvalidArgument, "b must lie in [0, 1]");
    }
}

bool ranks_before(const std::pair<double, std::uint32_t>& a, const std::pair<double, std::uint32_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
}

}  // namespace

TokenStream analyze(std::string_view text, Preprocess preprocess) {
    TokenStream ts = tokenize(text);
    return preprocess == Preprocess::StemLemma ? stem_and_lemmatize(ts) : ts;
}

double idf(std::size_t doc_count, std::size_t doc_freq) {
    const auto n = static_cast<double>(doc_freq);
    const auto total = static_cast<double>(doc_count);
    return std::log(1.0 + (total - n + 0.5) / (n + 0.5));
}

double idf(std::string_view term, const CorpusStats& stats) {
    const auto it = stats.doc_freq.find(std::string(term));
    return idf(stats.doc_count, it == stats.doc_freq.end() ? 0 : it->second);
}

Bm25Index Bm25Index::build(std::span<const CellPair> pairs, Bm25Params params, Preprocess preprocess) {
    if (pairs.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build a BM25 index over zero pairs");
    validate(params);

    Bm25Index ix;
    ix.params_ = params;
    ix.preprocess_ = preprocess;
    ix.docs_.assign(pairs.begin(), pairs.end());
    std::sort(ix.docs_.begin(), ix.docs_.end(),
              [](const CellPair& a, const CellPair& b) { return a.pair_id < b.pair_id; });
    for (std::size_t i = 1; i < ix.docs_.size(); ++i) {
        if (ix.docs_[i].pair_id == ix.docs_[i - 1].pair_id) {
            throw Error(ErrorKind::DuplicateDocId, "pair_id " + ix.docs_[i].pair_id + " appears twice");
        }
    }

    auto& stats = ix.stats_;
    stats.doc_count = ix.docs_.size();
    stats.doc_len.reserve(ix.docs_.size());
    std::uint64_t total_len = 0;
    for (std::uint32_t ord = 0; ord < ix.docs_.size(); ++ord) {
        const TokenStream ts = analyze(ix.docs_[ord].markdown, preprocess);
        std::map<std::string_view, std::uint32_t> counts;
        for (const auto& t : ts.tokens) ++counts[t];
        for (const auto& [term, tf] : counts) {
            // Ordinals are visited in increasing order, so each list stays sorted.
            ix.postings_[std::string(term)].push_back(Posting{ord, tf});
        }
        stats.doc_len.push_back(static_cast<std::uint32_t>(ts.field_len()));
        total_len += ts.field_len();
    }
    stats.avg_field_len = static_cast<double>(total_len) / static_cast<double>(stats.doc_count);
    for (const auto& [term, list] : ix.postings_) {
        stats.doc_freq.emplace(term, static_cast<std::uint32_t>(list.size()));
    }
    ix.finalize_lookup();
    return ix;
}

void Bm25Index::finalize_lookup() {
    ordinal_by_id_.clear();
    ordinal_by_id_.reserve(docs_.size());
    for (std::uint32_t i = 0; i < docs_.size(); ++i) ordinal_by_id_.emplace(docs_[i].pair_id, i);
}

double Bm25Index::term_weight(double idf_value, std::uint32_t tf, std::uint32_t doc_len) const {
    const double f = tf;
    const double norm =
        1.0 - params_.b + params_.b * static_cast<double>(doc_len) / stats_.avg_field_len;
    return idf_value * (f * (params_.k1 + 1.0)) / (f + params_.k1 * norm);
}

std::span<const Posting> Bm25Index::postings(std::string_view term) const {
    const auto it = postings_.find(std::string(term));
    if (it == postings_.end()) return {};
    return it->second;
}

bool Bm25Index::contains(std::string_view doc_id) const {
    return ordinal_by_id_.contains(std::string(doc_id));
}

double Bm25Index::score(const TokenStream& query, std::string_view doc_id) const {
    const auto it = ordinal_by_id_.find(std::string(doc_id));
    if (it == ordinal_by_id_.end()) throw Error(ErrorKind::UnknownDoc, "no document " + std::string(doc_id));
    const std::uint32_t ord = it->second;

    double total = 0.0;
    for (const auto& term : query.tokens) {
        const auto list = postings(term);
        const auto pos = std::lower_bound(list.begin(), list.end(), ord,
                                          [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (pos == list.end() || pos->doc != ord) continue;
        total += term_weight(idf(stats_.doc_count, list.size()), pos->term_freq, stats_.doc_len[ord]);
    }
    return total;
}

std::vector<ScoredPair> Bm25Index::top_k(const TokenStream& query, std::size_t k) const {
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");

    // Accumulate in query-token order so each document's sum matches score().
    std::vector<double> acc(docs_.size(), 0.0);
    for (const auto& term : query.tokens) {
        const auto list = postings(term);
        if (list.empty()) continue;
        const double w = idf(stats_.doc_count, list.size());
        for (const auto& p : list) acc[p.doc] += term_weight(w, p.term_freq, stats_.doc_len[p.doc]);
    }

    std::vector<std::pair<double, std::uint32_t>> hits;
    for (std::uint32_t i = 0; i < acc.size(); ++i) {
        if (acc[i] > 0.0) hits.emplace_back(acc[i], i);
    }
    const std::size_t n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), ranks_before);

    std::vector<ScoredPair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(ScoredPair{docs_[hits[i].second], hits[i].first});
    return out;
}

void Bm25Index::save(std::ostream& out) const {
    BinaryWriter w;
    w.f64(params_.k1);
    w.f64(params_.b);
    w.u8(static_cast<std::uint8_t>(preprocess_));
    w.f64(stats_.avg_field_len);
    w.u64(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        w.pair(docs_[i]);
        w.u32(stats_.doc_len[i]);
    }
    std::vector<std::string_view> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, list] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    w.u64(terms.size());
    for (const auto term : terms) {
        const auto& list = postings_.at(std::string(term));
        w.str(term);
        w.u64(list.size());
        for (const auto& p : list) {
            w.u32(p.doc);
            w.u32(p.term_freq);
        }
    }
    write_container(out, SectionTag::Bm25, w.data());
}

Bm25Index Bm25Index::load(std::istream& in) {
    const std::string body = read_container(in, SectionTag::Bm25);
    BinaryReader r(body);
    auto corrupt = [](const std::string& what) { return Error(ErrorKind::CorruptIndex, what); };

    Bm25Index ix;
    ix.params_.k1 = r.f64();
    ix.params_.b = r.f64();
    const auto pre = r.u8();
    if (pre > static_cast<std::uint8_t>(Preprocess::StemLemma)) throw corrupt("bad preprocess tag");
    ix.preprocess_ = static_cast<Preprocess>(pre);
    ix.stats_.avg_field_len = r.f64();
    const auto doc_count = r.u64();
    if (doc_count == 0 || doc_count > body.size()) throw corrupt("bad document count");
    ix.docs_.reserve(doc_count);
    ix.stats_.doc_len.reserve(doc_count);
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        ix.docs_.push_back(r.pair());
        ix.stats_.doc_len.push_back(r.u32());
        if (i > 0 && !(ix.docs_[i - 1].pair_id < ix.docs_[i].pair_id)) throw corrupt("documents not sorted");
    }
    ix.stats_.doc_count = doc_count;

    const auto term_count = r.u64();
    if (term_count > body.size()) throw corrupt("bad term count");
    for (std::uint64_t t = 0; t < term_count; ++t) {
        std::string term = r.str();
        const auto n = r.u64();
        if (n == 0 || n > doc_count) throw corrupt("bad posting count for " + term);
        std::vector<Posting> list;
        list.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            Posting p{r.u32(), r.u32()};
            if (p.doc >= doc_count || p.term_freq == 0) throw corrupt("bad posting for " + term);
            if (!list.empty() && list.back().doc >= p.doc) throw corrupt("unsorted postings for " + term);
            list.push_back(p);
        }
        ix.stats_.doc_freq.emplace(term, static_cast<std::uint32_t>(n));
        if (!ix.postings_.emplace(std::move(term), std::move(list)).second) throw corrupt("duplicate term");
    }
    if (!r.done()) throw corrupt("trailing bytes in BM25 section");
    try {
        validate(ix.params_);
    } catch (const Error& e) {
        throw corrupt(e.what());
    }
    ix.finalize_lookup();
    return ix;
}

}  // namespace cellrec
