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

#include "cellrec/notebook.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cellrec/digest.hpp"
#include "cellrec/error.hpp"

namespace cellrec {

namespace {

using json = nlohmann::json;

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    });
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw Error(ErrorKind::MalformedManifest,
                    "unterminated quote on line " + std::to_string(line_no));
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

std::string_view to_string(AuthorRank rank) {
    switch (rank) {
        case AuthorRank::GrandMaster: return "grandmaster";
        case AuthorRank::Master: return "master";
        case AuthorRank::Expert: return "expert";
        case AuthorRank::Other: return "other";
    }
    return "other";
}

std::optional<AuthorRank> parse_rank(std::string_view text) {
    const std::string lower = ascii_lower(trim(text));
    if (lower == "grandmaster") return AuthorRank::GrandMaster;
    if (lower == "master") return AuthorRank::Master;
    if (lower == "expert") return AuthorRank::Expert;
    if (lower == "other") return AuthorRank::Other;
    return std::nullopt;
}

std::string make_pair_id(std::string_view notebook_id, std::size_t position) {
    std::string key(notebook_id);
    key.push_back('\x1f');
    key += std::to_string(position);
    return sha256_hex(key).substr(0, 16);
}

RawNotebook parse_notebook(std::string_view bytes, AuthorRank rank, std::string notebook_id) {
    json doc = json::parse(bytes.begin(), bytes.end(), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        throw Error(ErrorKind::MalformedNotebook, notebook_id + ": not valid JSON");
    }
    if (!doc.is_object() || !doc.contains("cells") || !doc["cells"].is_array()) {
        throw Error(ErrorKind::MalformedNotebook, notebook_id + ": missing cells array");
    }

    RawNotebook nb;
    nb.notebook_id = std::move(notebook_id);
    nb.author_rank = rank;
    const auto& cells = doc["cells"];
    nb.cells.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& cell = cells[i];
        if (!cell.is_object()) {
            throw Error(ErrorKind::MalformedNotebook,
                        nb.notebook_id + ": cell " + std::to_string(i) + " is not an object");
        }
        RawCell raw;
        const auto type_it = cell.find("cell_type");
        if (type_it != cell.end() && type_it->is_string()) {
            const auto& t = type_it->get_ref<const std::string&>();
            if (t == "markdown") {
                raw.type = CellType::Markdown;
            } else if (t == "code") {
                raw.type = CellType::Code;
            }
        }
        const auto src_it = cell.find("source");
        if (src_it != cell.end()) {
            if (src_it->is_string()) {
                raw.source = src_it->get<std::string>();
            } else if (src_it->is_array()) {
                for (const auto& line : *src_it) {
                    if (!line.is_string()) {
                        throw Error(ErrorKind::MalformedNotebook,
                                    nb.notebook_id + ": non-string source line in cell " +
                                        std::to_string(i));
                    }
                    raw.source += line.get_ref<const std::string&>();
                }
            } else if (!src_it->is_null()) {
                throw Error(ErrorKind::MalformedNotebook,
                            nb.notebook_id + ": bad source in cell " + std::to_string(i));
            }
        }
        nb.cells.push_back(std::move(raw));
    }
    return nb;
}

std::vector<CellPair> extract_pairs(const RawNotebook& nb) {
    std::vector<CellPair> pairs;
    std::string run;
    bool in_run = false;
    for (std::size_t i = 0; i < nb.cells.size(); ++i) {
        const RawCell& cell = nb.cells[i];
        switch (cell.type) {
            case CellType::Markdown:
                in_run = true;
                if (!is_blank(cell.source)) {
                    if (!run.empty()) run += "\n\n";
                    run += cell.source;
                }
                break;
            case CellType::Code:
                if (in_run && !run.empty() && !is_blank(cell.source)) {
                    pairs.push_back(CellPair{make_pair_id(nb.notebook_id, i), run, cell.source,
                                             nb.notebook_id, nb.author_rank, i});
                }
                in_run = false;
                run.clear();
                break;
            case CellType::Other:
                in_run = false;
                run.clear();
                break;
        }
    }
    return pairs;
}

KeywordSet default_plot_keywords() {
    return {"matplotlib", "plt.", "plot", "chart", "seaborn", "hist", "scatter", "pie", "boxplot"};
}

std::vector<CellPair> filter_plot_pairs(std::span<const CellPair> pairs, const KeywordSet& keywords) {
    if (keywords.empty()) {
        throw Error(ErrorKind::InvalidArgument, "plot keyword set must not be empty");
    }
    KeywordSet lowered;
    lowered.reserve(keywords.size());
    for (const auto& k : keywords) lowered.push_back(ascii_lower(k));

    std::vector<CellPair> kept;
    for (const auto& pair : pairs) {
        const std::string code = ascii_lower(pair.code);
        const std::string md = ascii_lower(pair.markdown);
        const bool hit = std::any_of(lowered.begin(), lowered.end(), [&](const std::string& k) {
            return code.find(k) != std::string::npos || md.find(k) != std::string::npos;
        });
        if (hit) kept.push_back(pair);
    }
    return kept;
}

std::map<AuthorRank, std::vector<CellPair>> partition_by_rank(std::span<const CellPair> pairs) {
    std::map<AuthorRank, std::vector<CellPair>> buckets{
        {AuthorRank::GrandMaster, {}},
        {AuthorRank::Master, {}},
        {AuthorRank::Expert, {}},
        {AuthorRank::Other, {}},
    };
    for (const auto& pair : pairs) buckets[pair.author_rank].push_back(pair);
    return buckets;
}

std::vector<ManifestEntry> parse_ingest_manifest(std::string_view csv_text) {
    std::vector<ManifestEntry> entries;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t path_col = 0;
    std::size_t rank_col = 1;

    std::size_t start = 0;
    while (start <= csv_text.size()) {
        std::size_t end = csv_text.find('\n', start);
        if (end == std::string_view::npos) end = csv_text.size();
        std::string_view line = csv_text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (trim(line).empty()) continue;

        auto fields = split_csv_line(line, line_no);
        if (!header_seen) {
            header_seen = true;
            std::optional<std::size_t> p;
            std::optional<std::size_t> r;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string name = ascii_lower(trim(fields[i]));
                if (name == "path") p = i;
                if (name == "rank") r = i;
            }
            if (!p || !r) {
                throw Error(ErrorKind::MalformedManifest, "header must name columns path,rank");
            }
            path_col = *p;
            rank_col = *r;
            continue;
        }
        if (fields.size() <= std::max(path_col, rank_col)) {
            throw Error(ErrorKind::MalformedManifest,
                        "line " + std::to_string(line_no) + ": expected path,rank");
        }
        const auto rank = parse_rank(fields[rank_col]);
        if (!rank) {
            throw Error(ErrorKind::MalformedManifest,
                        "line " + std::to_string(line_no) + ": unknown rank '" + fields[rank_col] + "'");
        }
        entries.push_back(ManifestEntry{std::string(trim(fields[path_col])), *rank});
    }
    if (!header_seen) throw Error(ErrorKind::MalformedManifest, "empty manifest");
    return entries;
}

std::vector<ManifestEntry> read_ingest_manifest(const std::filesystem::path& csv_path) {
    return parse_ingest_manifest(read_file(csv_path));
}

IngestResult ingest_corpus(const std::filesystem::path& notebook_dir,
                           std::span<const ManifestEntry> entries,
                           const std::function<void(const SkippedFile&)>& on_skip) {
    struct FileOutcome {
        std::vector<CellPair> pairs;
        std::optional<SkippedFile> skipped;
    };

    // notebook_id must be unique within one run; repeated paths are skipped.
    std::vector<bool> duplicate(entries.size(), false);
    {
        std::map<std::string_view, std::size_t> seen;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (!seen.emplace(entries[i].path, i).second) duplicate[i] = true;
        }
    }

    auto process = [&](std::size_t i) {
        const ManifestEntry& entry = entries[i];
        FileOutcome out;
        if (duplicate[i]) {
            out.skipped = SkippedFile{entry.path, "duplicate manifest entry"};
            return out;
        }
        try {
            const std::string bytes = read_file(notebook_dir / entry.path);
            out.pairs = extract_pairs(parse_notebook(bytes, entry.rank, entry.path));
        } catch (const Error& e) {
            out.skipped = SkippedFile{entry.path, e.what()};
        }
        return out;
    };

    // Files are independent; workers take a strided share each.
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), entries.size()));
    std::vector<FileOutcome> outcomes(entries.size());
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < entries.size(); i += workers) outcomes[i] = process(i);
        }));
    }
    for (auto& t : tasks) t.get();

    IngestResult result;
    for (auto& outcome : outcomes) {
        if (outcome.skipped) {
            if (on_skip) on_skip(*outcome.skipped);
            result.skipped.push_back(std::move(*outcome.skipped));
            continue;
        }
        ++result.notebooks_parsed;
        for (auto& p : outcome.pairs) result.pairs.push_back(std::move(p));
    }
    std::sort(result.pairs.begin(), result.pairs.end(), [](const CellPair& a, const CellPair& b) {
        if (a.notebook_id != b.notebook_id) return a.notebook_id < b.notebook_id;
        return a.position < b.position;
    });
    return result;
}

}  // namespace cellrec
