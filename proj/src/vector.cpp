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

#include "cellrec/vector.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "cellrec/container.hpp"
#include "cellrec/digest.hpp"
#include "cellrec/error.hpp"
#include "cellrec/text.hpp"

namespace cellrec {

namespace {

using json = nlohmann::json;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine_with_norms(std::span<const double> a, std::span<const double> b, double na, double nb) {
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

bool ranks_before(const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "cosine over dims " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::ZeroVector, "cosine of a zero vector is undefined");
    return cosine_with_norms(a, b, na, nb);
}

std::string_view to_string(ProviderKind kind) {
    return kind == ProviderKind::RemoteService ? "remote" : "hash";
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dim) {
    if (dim == 0) throw Error(ErrorKind::InvalidArgument, "embedding dimension must be positive");
    EmbeddingVector v(dim, 0.0);
    for (const auto& token : tokenize(text).tokens) v[fnv1a64(token) % dim] += 1.0;
    const double norm = l2_norm(v);
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    }
    return v;
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error(ErrorKind::InvalidArgument, "embedding dimension must be positive");
}

std::vector<EmbeddingVector> HashEmbeddingProvider::embed(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hash_embed(t, dim_));
    return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(EmbeddingProviderSpec spec) : spec_(std::move(spec)) {
    if (spec_.dim == 0) throw Error(ErrorKind::InvalidArgument, "embedding dimension must be positive");
    if (spec_.batch_size == 0) throw Error(ErrorKind::InvalidArgument, "batch size must be positive");
    const auto scheme_end = spec_.endpoint.find("://");
    if (scheme_end == std::string::npos || spec_.endpoint.compare(0, scheme_end, "http") != 0) {
        throw Error(ErrorKind::InvalidArgument, "endpoint must be an http:// URL, got '" + spec_.endpoint + "'");
    }
    const auto path_start = spec_.endpoint.find('/', scheme_end + 3);
    scheme_host_port_ = spec_.endpoint.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : spec_.endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + "/embed";
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += spec_.batch_size) {
        const auto batch = texts.subspan(start, std::min(spec_.batch_size, texts.size() - start));
        for (auto& v : embed_batch(batch)) out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
    const std::string body = json{{"texts", texts}}.dump();
    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(spec_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(spec_.timeout - secs);
    client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_write_timeout(secs.count(), static_cast<time_t>(usecs.count()));

    std::string last_error;
    int attempts = 0;
    auto backoff = spec_.initial_backoff;
    for (int round = 0; round <= spec_.max_retries; ++round) {
        if (round > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        ++attempts;
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_error = scheme_host_port_ + path_ + ": " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = scheme_host_port_ + path_ + ": HTTP " + std::to_string(res->status);
            continue;
        }

        json doc = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("vectors") || !doc["vectors"].is_array()) {
            throw ProviderUnavailable("malformed response from " + scheme_host_port_ + path_, attempts);
        }
        if (!doc.contains("dim") || !doc["dim"].is_number_unsigned() || doc["dim"].get<std::size_t>() != spec_.dim) {
            throw ProviderUnavailable("service dimension " + (doc.contains("dim") ? doc["dim"].dump() : "<missing>") +
                                          " does not match declared " + std::to_string(spec_.dim),
                                      attempts);
        }
        const auto& vectors = doc["vectors"];
        if (vectors.size() != texts.size()) {
            throw ProviderUnavailable("expected " + std::to_string(texts.size()) + " vectors, got " +
                                          std::to_string(vectors.size()),
                                      attempts);
        }
        std::vector<EmbeddingVector> out;
        out.reserve(vectors.size());
        for (const auto& row : vectors) {
            if (!row.is_array() || row.size() != spec_.dim) {
                throw ProviderUnavailable("vector length does not match declared dimension", attempts);
            }
            EmbeddingVector v;
            v.reserve(spec_.dim);
            for (const auto& x : row) {
                if (!x.is_number() || !std::isfinite(x.get<double>())) {
                    throw ProviderUnavailable("non-finite vector component", attempts);
                }
                v.push_back(x.get<double>());
            }
            out.push_back(std::move(v));
        }
        return out;
    }
    throw ProviderUnavailable(last_error, attempts);
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderSpec& spec) {
    if (spec.kind == ProviderKind::RemoteService) return std::make_unique<RemoteEmbeddingProvider>(spec);
    return std::make_unique<HashEmbeddingProvider>(spec.dim);
}

std::vector<EmbeddingVector> embed(std::span<const std::string> texts, const EmbeddingProviderSpec& spec) {
    if (texts.empty()) throw Error(ErrorKind::EmptyInput, "no texts to embed");
    return make_provider(spec)->embed(texts);
}

VectorIndex VectorIndex::build(std::span<const CellPair> pairs, EmbeddingProvider& provider) {
    if (pairs.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build a vector index over zero pairs");
    std::vector<CellPair> docs(pairs.begin(), pairs.end());
    std::sort(docs.begin(), docs.end(), [](const CellPair& a, const CellPair& b) { return a.pair_id < b.pair_id; });
    for (std::size_t i = 1; i < docs.size(); ++i) {
        if (docs[i].pair_id == docs[i - 1].pair_id) {
            throw Error(ErrorKind::DuplicateDocId, "pair_id " + docs[i].pair_id + " appears twice");
        }
    }

    std::vector<std::string> code;
    code.reserve(docs.size());
    for (const auto& p : docs) code.push_back(p.code);
    const auto vectors = provider.embed(code);
    if (vectors.size() != docs.size()) {
        throw Error(ErrorKind::DimensionMismatch, "provider returned a wrong number of vectors");
    }

    VectorIndex ix;
    ix.dim_ = provider.dim();
    ix.values_.reserve(docs.size() * ix.dim_);
    for (const auto& v : vectors) {
        if (v.size() != ix.dim_) throw Error(ErrorKind::DimensionMismatch, "provider returned a vector of wrong size");
        ix.values_.insert(ix.values_.end(), v.begin(), v.end());
    }
    ix.docs_ = std::move(docs);
    ix.compute_norms();
    return ix;
}

void VectorIndex::compute_norms() {
    norms_.clear();
    norms_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) norms_.push_back(l2_norm(vector(i)));
}

std::span<const double> VectorIndex::vector(std::size_t ordinal) const {
    return std::span<const double>(values_).subspan(ordinal * dim_, dim_);
}

bool VectorIndex::contains(std::string_view pair_id) const {
    const auto it = std::lower_bound(docs_.begin(), docs_.end(), pair_id,
                                     [](const CellPair& p, std::string_view id) { return p.pair_id < id; });
    return it != docs_.end() && it->pair_id == pair_id;
}

std::vector<ScoredPair> VectorIndex::top_k(std::string_view query_markdown, EmbeddingProvider& provider,
                                           std::size_t k) const {
    if (docs_.empty()) throw Error(ErrorKind::EmptyIndex, "vector index is empty");
    if (provider.dim() != dim_) {
        throw Error(ErrorKind::DimensionMismatch, "provider dim " + std::to_string(provider.dim()) +
                                                      " does not match index dim " + std::to_string(dim_));
    }
    const std::string text(query_markdown);
    const auto vectors = provider.embed(std::span<const std::string>(&text, 1));
    if (vectors.size() != 1) throw Error(ErrorKind::DimensionMismatch, "provider returned no query vector");
    return top_k(vectors.front(), k);
}

std::vector<ScoredPair> VectorIndex::top_k(std::span<const double> query, std::size_t k) const {
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
    if (docs_.empty()) throw Error(ErrorKind::EmptyIndex, "vector index is empty");
    if (query.size() != dim_) {
        throw Error(ErrorKind::DimensionMismatch, "query dim " + std::to_string(query.size()) +
                                                      " does not match index dim " + std::to_string(dim_));
    }
    const double qn = l2_norm(query);
    std::vector<std::pair<double, std::size_t>> hits;
    hits.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const double sim = (qn == 0.0 || norms_[i] == 0.0) ? 0.0 : cosine_with_norms(query, vector(i), qn, norms_[i]);
        hits.emplace_back(sim, i);
    }
    const std::size_t n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), ranks_before);

    std::vector<ScoredPair> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(ScoredPair{docs_[hits[i].second], hits[i].first});
    return out;
}

void VectorIndex::save(std::ostream& out) const {
    BinaryWriter w;
    w.u64(dim_);
    w.u64(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        w.pair(docs_[i]);
        for (double x : vector(i)) w.f64(x);
    }
    write_container(out, SectionTag::Vector, w.data());
}

VectorIndex VectorIndex::load(std::istream& in) {
    const std::string body = read_container(in, SectionTag::Vector);
    BinaryReader r(body);
    VectorIndex ix;
    ix.dim_ = r.u64();
    const auto count = r.u64();
    if (ix.dim_ == 0 || count == 0 || count > body.size() || ix.dim_ > body.size()) {
        throw Error(ErrorKind::CorruptIndex, "bad vector index header");
    }
    ix.docs_.reserve(count);
    ix.values_.reserve(count * ix.dim_);
    for (std::uint64_t i = 0; i < count; ++i) {
        ix.docs_.push_back(r.pair());
        if (i > 0 && !(ix.docs_[i - 1].pair_id < ix.docs_[i].pair_id)) {
            throw Error(ErrorKind::CorruptIndex, "vector entries not sorted");
        }
        for (std::size_t d = 0; d < ix.dim_; ++d) {
            const double x = r.f64();
            if (!std::isfinite(x)) throw Error(ErrorKind::CorruptIndex, "non-finite vector component");
            ix.values_.push_back(x);
        }
    }
    if (!r.done()) throw Error(ErrorKind::CorruptIndex, "trailing bytes in vector section");
    ix.compute_norms();
    return ix;
}

}  // namespace cellrec
