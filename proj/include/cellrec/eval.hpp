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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cellrec/notebook.hpp"
#include "cellrec/recommender.hpp"

namespace cellrec {

/// Self-retrieval outcome for one (rank group, method).
struct SanityReport {
    RankGroup rank_group = RankGroup::All;
    Method method = Method::Bm25;
    std::size_t total_items = 0;
    std::size_t total_correct = 0;

    double percent_correct() const {
        return total_items == 0 ? 0.0 : 100.0 * static_cast<double>(total_correct) / static_cast<double>(total_items);
    }
};

/// Queries the index with every pair's markdown and counts the pairs whose
/// own code comes back, byte for byte, at rank 1. The index must have been
/// built from `pairs`; a pair_id it does not hold raises Error(IndexMismatch).
SanityReport sanity_check(std::span<const CellPair> pairs, Method method, RankGroup group,
                          const IndexSet& indexes, EmbeddingProvider* provider);

struct PlotQuery {
    std::string plot_type;  // family, e.g. "Statistics Plots"
    std::string sub_type;   // e.g. "Hist2d"
    std::string query_text;

    bool operator==(const PlotQuery&) const = default;
};

/// The 30 Matplotlib visualization queries in five families, fixed order.
const std::vector<PlotQuery>& generate_plot_queries();

/// Lowercase substrings that must all occur in a code cell for it to count as
/// drawing `sub_type` (e.g. {"hist2d"}, or {"3d", "plot_surface"}).
std::vector<std::string> canonical_tokens(std::string_view sub_type);

enum class HumanVerdict { Unjudged, Correct, Incorrect };

std::string_view to_string(HumanVerdict verdict);
std::optional<HumanVerdict> parse_verdict(std::string_view text);

struct PlotEvalRow {
    PlotQuery query;
    RankGroup rank_group = RankGroup::All;
    Method method = Method::Bm25;
    std::string top1_code;  // empty when nothing was recommended
    std::string top1_pair_id;
    std::string top1_notebook_id;
    double top1_score = 0.0;
    // Machine proxy for relevance; never a substitute for human_verdict.
    bool auto_relevant = false;
    HumanVerdict human_verdict = HumanVerdict::Unjudged;
    std::optional<std::string> error;  // row-level failure, e.g. IndexMissing
};

/// One row per (query x group x method), each holding the rank-1
/// recommendation. Failures are recorded on the row instead of aborting.
/// Rows come back sorted by (query order, group, method).
std::vector<PlotEvalRow> plot_eval(std::span<const PlotQuery> queries, std::span<const RankGroup> groups,
                                   std::span<const Method> methods, const IndexSet& indexes,
                                   EmbeddingProvider* provider);

/// Review file: JSON lines, one row each. human_verdict may be edited in
/// place and the file read back.
void write_review_file(std::ostream& out, std::span<const PlotEvalRow> rows);
std::vector<PlotEvalRow> read_review_file(std::istream& in);

nlohmann::json to_json(const PlotEvalRow& row);
PlotEvalRow row_from_json(const nlohmann::json& j);

struct FormattedReport {
    std::string text;
    nlohmann::json json;
};

/// Sanity table plus a plot-type grid (rows: sub types, columns: group x
/// method) with per-column totals for the proxy and for human verdicts.
FormattedReport report(std::span<const SanityReport> sanity, std::span<const PlotEvalRow> rows);

}  // namespace cellrec
