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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cellrec/bm25.hpp"
#include "cellrec/recommender.hpp"
#include "cellrec/vector.hpp"

namespace cellrec {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kManifestVersion = "cellrec-index/1";

struct IndexEntry {
    RankGroup group = RankGroup::All;
    Method method = Method::Bm25;
    std::string file;
    std::size_t doc_count = 0;
    std::string built_at;  // ISO-8601 UTC
    std::string digest;    // sha256 of the file bytes
};

/// Single source of truth for one index directory.
struct IndexManifest {
    std::string version = kManifestVersion;
    Bm25Params bm25;
    ProviderKind provider_kind = ProviderKind::HashFallback;
    std::string provider_endpoint;
    std::size_t provider_dim = 0;
    std::vector<IndexEntry> entries;  // sorted by (group, method)

    const IndexEntry* find(RankGroup group, Method method) const;
};

nlohmann::json to_json(const IndexManifest& m);
IndexManifest manifest_from_json(const nlohmann::json& j);

/// Every index for one corpus, before persistence.
struct CorpusBuild {
    IndexSet indexes;
    std::vector<std::pair<RankGroup, Method>> keys;
    std::vector<std::pair<RankGroup, std::size_t>> group_sizes;
    Bm25Params bm25;
    EmbeddingProviderSpec provider;
};

/// Builds BM25 (plain and stem/lemma) and vector indexes for each non-empty
/// rank group plus the merged All group. Nothing is returned if any build
/// fails. Throws Error(EmptyCorpus) for no pairs.
CorpusBuild build_corpus_indexes(std::span<const CellPair> pairs, const Bm25Params& bm25,
                                 const EmbeddingProviderSpec& spec, EmbeddingProvider& provider);

/// Writes every index file and then the manifest. Each file is staged under a
/// temporary name and renamed into place. A `.lock` file guards against
/// concurrent writers. `built_at` is stamped on every entry.
IndexManifest write_index_dir(const std::filesystem::path& dir, const CorpusBuild& build,
                              const std::string& built_at);

/// SOURCE_DATE_EPOCH when set, the current time otherwise, as ISO-8601 UTC.
std::string build_timestamp();

/// Read side of an index directory. Every file is checked against its
/// manifest digest before it is parsed.
class IndexStore {
public:
    /// Throws Error(IndexMissing) naming the expected path when the directory
    /// or its manifest is absent, Error(CorruptIndex) for a bad manifest.
    explicit IndexStore(std::filesystem::path dir);

    const IndexManifest& manifest() const noexcept { return manifest_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

    /// Throws Error(IndexMissing) when the manifest has no such entry and
    /// Error(CorruptIndex) on a digest mismatch.
    void load_into(IndexSet& set, RankGroup group, Method method) const;

    /// Provider recorded at build time.
    EmbeddingProviderSpec provider_spec() const;

private:
    std::string read_verified(const IndexEntry& entry) const;

    std::filesystem::path dir_;
    IndexManifest manifest_;
};

}  // namespace cellrec
