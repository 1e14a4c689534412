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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cellrec {

/// Kaggle author tier of the notebook's owner.
enum class AuthorRank { GrandMaster, Master, Expert, Other };

std::string_view to_string(AuthorRank rank);
/// Accepts grandmaster|master|expert|other, case-insensitive.
std::optional<AuthorRank> parse_rank(std::string_view text);

enum class CellType { Markdown, Code, Other };

struct RawCell {
    CellType type = CellType::Other;
    std::string source;

    bool operator==(const RawCell&) const = default;
};

struct RawNotebook {
    std::string notebook_id;
    AuthorRank author_rank = AuthorRank::Other;
    std::vector<RawCell> cells;
};

/// A markdown run and the code cell immediately following it.
struct CellPair {
    std::string pair_id;
    std::string markdown;
    std::string code;
    std::string notebook_id;
    AuthorRank author_rank = AuthorRank::Other;
    std::size_t position = 0;  // index of the code cell within its notebook

    bool operator==(const CellPair&) const = default;
};

/// Stable identifier derived from (notebook_id, code-cell position).
std::string make_pair_id(std::string_view notebook_id, std::size_t position);

/// Parses an nbformat v4 document. Cell `source` may be a string or a list
/// of strings; list entries are concatenated verbatim. Outputs are ignored.
/// Throws Error(MalformedNotebook) when the bytes are not JSON or there is
/// no `cells` array.
RawNotebook parse_notebook(std::string_view bytes, AuthorRank rank, std::string notebook_id);

/// Pairs every maximal markdown run with the single code cell right after it.
/// Runs are joined with a blank line. Blank markdown cells are skipped inside
/// a run; a run or code cell that is blank after trimming yields no pair.
std::vector<CellPair> extract_pairs(const RawNotebook& nb);

using KeywordSet = std::vector<std::string>;

KeywordSet default_plot_keywords();

/// Keeps pairs whose code or markdown contains any keyword (ASCII
/// case-insensitive substring match). Order is preserved.
std::vector<CellPair> filter_plot_pairs(std::span<const CellPair> pairs, const KeywordSet& keywords);

/// Buckets pairs by author rank. All four buckets are always present.
std::map<AuthorRank, std::vector<CellPair>> partition_by_rank(std::span<const CellPair> pairs);

struct ManifestEntry {
    std::string path;
    AuthorRank rank = AuthorRank::Other;
};

/// Reads the `path,rank` ingestion manifest (header row required).
std::vector<ManifestEntry> parse_ingest_manifest(std::string_view csv_text);
std::vector<ManifestEntry> read_ingest_manifest(const std::filesystem::path& csv_path);

struct SkippedFile {
    std::string path;
    std::string reason;
};

struct IngestResult {
    std::vector<CellPair> pairs;  // sorted by (notebook_id, position)
    std::vector<SkippedFile> skipped;
    std::size_t notebooks_parsed = 0;
};

/// Parses and pairs every manifest entry, resolved against `notebook_dir`.
/// Unreadable or malformed files are recorded in `skipped` and reported to
/// `on_skip` if given. The notebook id is the manifest path.
IngestResult ingest_corpus(const std::filesystem::path& notebook_dir,
                           std::span<const ManifestEntry> entries,
                           const std::function<void(const SkippedFile&)>& on_skip = {});

}  // namespace cellrec
