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

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cellrec/bm25.hpp"
#include "cellrec/notebook.hpp"

namespace cellrec {

using EmbeddingVector = std::vector<double>;

/// (A . B) / (|A| |B|), clamped to [-1, 1] against rounding.
/// Throws Error(DimensionMismatch) or Error(ZeroVector).
double cosine(std::span<const double> a, std::span<const double> b);

enum class ProviderKind { RemoteService, HashFallback };

std::string_view to_string(ProviderKind kind);

struct EmbeddingProviderSpec {
    ProviderKind kind = ProviderKind::HashFallback;
    std::string endpoint;  // base URL of the embedding service, RemoteService only
    std::size_t dim = 256;

    // Remote transport tuning.
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds timeout{30000};
    std::size_t batch_size = 64;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    /// One vector of dimension dim() per text, in input order.
    virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
    virtual std::size_t dim() const = 0;
};

/// Deterministic local embedding: each token of tokenize(text) is hashed
/// (FNV-1a 64, fixed seed) into one of `dim` buckets, counts are accumulated
/// and the result is L2-normalized. Text without tokens maps to the zero
/// vector.
EmbeddingVector hash_embed(std::string_view text, std::size_t dim);

class HashEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(std::size_t dim);

    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
};

/// Client for the embedding service:
///   POST <endpoint>/embed  {"texts": [...]}  ->  {"vectors": [[...], ...], "dim": d}
/// Transport failures and non-200 responses are retried `max_retries` times
/// with exponential backoff. A response whose dim differs from the declared
/// dimension is rejected immediately.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit RemoteEmbeddingProvider(EmbeddingProviderSpec spec);

    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
    std::size_t dim() const override { return spec_.dim; }

private:
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);

    EmbeddingProviderSpec spec_;
    std::string scheme_host_port_;
    std::string path_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderSpec& spec);

/// Throws Error(EmptyInput) for no texts; propagates ProviderUnavailable.
std::vector<EmbeddingVector> embed(std::span<const std::string> texts, const EmbeddingProviderSpec& spec);

/// Exhaustive-scan cosine index over the code side of cell pairs.
class VectorIndex {
public:
    /// Embeds every pair's code. Nothing is constructed if the provider fails.
    static VectorIndex build(std::span<const CellPair> pairs, EmbeddingProvider& provider);

    /// Embeds the query markdown with `provider` and ranks every stored code
    /// vector by cosine, similarity descending then pair_id ascending.
    std::vector<ScoredPair> top_k(std::string_view query_markdown, EmbeddingProvider& provider,
                                  std::size_t k) const;

    /// Ranking against an already embedded query. A zero-norm vector on either
    /// side scores 0.
    std::vector<ScoredPair> top_k(std::span<const double> query, std::size_t k) const;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return docs_.size(); }
    const std::vector<CellPair>& documents() const noexcept { return docs_; }
    std::span<const double> vector(std::size_t ordinal) const;
    bool contains(std::string_view pair_id) const;

    void save(std::ostream& out) const;
    static VectorIndex load(std::istream& in);

private:
    VectorIndex() = default;
    void compute_norms();

    std::size_t dim_ = 0;
    std::vector<CellPair> docs_;  // ascending pair_id
    std::vector<double> values_;  // docs_.size() * dim_, row-major
    std::vector<double> norms_;
};

}  // namespace cellrec
