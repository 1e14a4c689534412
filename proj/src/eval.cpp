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

#include "cellrec/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "cellrec/error.hpp"

namespace cellrec {

namespace {

using json = nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

// Display width in code points; every glyph used in reports is single-width.
std::size_t display_width(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad_right(std::string_view s, std::size_t width) {
    std::string out(s);
    for (std::size_t w = display_width(s); w < width; ++w) out.push_back(' ');
    return out;
}

std::string pad_left(std::string_view s, std::size_t width) {
    std::string out;
    for (std::size_t w = display_width(s); w < width; ++w) out.push_back(' ');
    out += s;
    return out;
}

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::size_t query_order(const PlotQuery& q) {
    const auto& all = generate_plot_queries();
    const auto it = std::find(all.begin(), all.end(), q);
    return static_cast<std::size_t>(it - all.begin());
}

bool row_before(const PlotEvalRow& a, const PlotEvalRow& b) {
    const auto qa = query_order(a.query);
    const auto qb = query_order(b.query);
    if (qa != qb) return qa < qb;
    if (a.query.query_text != b.query.query_text) return a.query.query_text < b.query.query_text;
    if (a.rank_group != b.rank_group) return a.rank_group < b.rank_group;
    return a.method < b.method;
}

}  // namespace

SanityReport sanity_check(std::span<const CellPair> pairs, Method method, RankGroup group,
                          const IndexSet& indexes, EmbeddingProvider* provider) {
    if (pairs.empty()) throw Error(ErrorKind::InvalidArgument, "sanity check needs at least one pair");
    if (!indexes.has(group, method)) {
        throw Error(ErrorKind::IndexMissing, "no " + std::string(to_string(method)) + " index for group " +
                                                 std::string(to_string(group)));
    }
    for (const auto& p : pairs) {
        const bool known = method == Method::Vector ? indexes.vector(group)->contains(p.pair_id)
                                                    : indexes.bm25(group, method)->contains(p.pair_id);
        if (!known) throw Error(ErrorKind::IndexMismatch, "pair " + p.pair_id + " is not in the queried index");
    }

    SanityReport rep{group, method, pairs.size(), 0};
    if (method == Method::Vector) {
        if (provider == nullptr) throw Error(ErrorKind::InvalidArgument, "vector sanity check needs a provider");
        const VectorIndex& ix = *indexes.vector(group);
        std::vector<std::string> queries;
        queries.reserve(pairs.size());
        for (const auto& p : pairs) queries.push_back(p.markdown);
        const auto vectors = provider->embed(queries);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto hits = ix.top_k(vectors[i], 1);
            if (!hits.empty() && hits.front().pair.code == pairs[i].code) ++rep.total_correct;
        }
        return rep;
    }

    for (const auto& p : pairs) {
        const auto recs = recommend(QueryRequest{p.markdown, method, 1, group}, indexes, nullptr);
        // "Exact copy": byte equality, no whitespace normalization.
        if (!recs.empty() && recs.front().code == p.code) ++rep.total_correct;
    }
    return rep;
}

const std::vector<PlotQuery>& generate_plot_queries() {
    static const std::vector<PlotQuery> queries = [] {
        const std::vector<std::pair<std::string, std::vector<std::string>>> families = {
            {"Basic", {"Scatter", "Bar", "Stem", "Step", "Fill_between", "Stackplot"}},
            {"Plots of Arrays and Fields",
             {"Imshow", "Pcolormesh", "Contour", "Contourf", "Barbs", "Quiver", "Streamplot"}},
            {"Statistics Plots",
             {"Hist", "Boxplot", "Errorbar", "Violinplot", "Eventplot", "Hist2d", "Hexbin", "Pie"}},
            {"Unstructured Coordinates", {"Tricontour", "Tricontourf", "Tripcolor", "Triplot"}},
            {"3D",
             {"3D Scatterplot", "3D Surface", "Triangular 3D Surface", "3D Voxel , Volumetric Plot",
              "3D Wireframe Plot"}},
        };
        std::vector<PlotQuery> out;
        for (const auto& [family, subs] : families) {
            for (const auto& sub : subs) {
                // Query terms keep "3D" upper case and lowercase everything else.
                std::string term = lower(sub);
                for (std::size_t pos = term.find("3d"); pos != std::string::npos; pos = term.find("3d", pos + 2)) {
                    term.replace(pos, 2, "3D");
                }
                out.push_back(PlotQuery{family, sub, "plot data using " + term + " visualization"});
            }
        }
        return out;
    }();
    return queries;
}

std::vector<std::string> canonical_tokens(std::string_view sub_type) {
    static const std::map<std::string, std::vector<std::string>, std::less<>> special = {
        {"3d scatterplot", {"3d", "scatter"}},
        {"3d surface", {"3d", "plot_surface"}},
        {"triangular 3d surface", {"plot_trisurf"}},
        {"3d voxel , volumetric plot", {"voxels"}},
        {"3d wireframe plot", {"plot_wireframe"}},
    };
    const std::string key = lower(sub_type);
    if (const auto it = special.find(key); it != special.end()) return it->second;
    return {key};
}

std::string_view to_string(HumanVerdict verdict) {
    switch (verdict) {
        case HumanVerdict::Unjudged: return "unjudged";
        case HumanVerdict::Correct: return "correct";
        case HumanVerdict::Incorrect: return "incorrect";
    }
    return "unjudged";
}

std::optional<HumanVerdict> parse_verdict(std::string_view text) {
    const auto s = lower(text);
    if (s == "unjudged") return HumanVerdict::Unjudged;
    if (s == "correct") return HumanVerdict::Correct;
    if (s == "incorrect") return HumanVerdict::Incorrect;
    return std::nullopt;
}

std::vector<PlotEvalRow> plot_eval(std::span<const PlotQuery> queries, std::span<const RankGroup> groups,
                                   std::span<const Method> methods, const IndexSet& indexes,
                                   EmbeddingProvider* provider) {
    std::vector<PlotEvalRow> rows;
    rows.reserve(queries.size() * groups.size() * methods.size());
    for (const auto& q : queries) {
        const auto required = canonical_tokens(q.sub_type);
        for (const auto group : groups) {
            for (const auto method : methods) {
                PlotEvalRow row;
                row.query = q;
                row.rank_group = group;
                row.method = method;
                try {
                    const auto recs = recommend(QueryRequest{q.query_text, method, 1, group}, indexes, provider);
                    if (!recs.empty()) {
                        row.top1_code = recs.front().code;
                        row.top1_pair_id = recs.front().pair_id;
                        row.top1_notebook_id = recs.front().notebook_id;
                        row.top1_score = recs.front().score;
                    }
                    const std::string code = lower(row.top1_code);
                    row.auto_relevant = !code.empty() && std::all_of(required.begin(), required.end(),
                                                                     [&](const std::string& t) {
                                                                         return code.find(t) != std::string::npos;
                                                                     });
                } catch (const Error& e) {
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), row_before);
    return rows;
}

json to_json(const PlotEvalRow& row) {
    json j = {
        {"plot_type", row.query.plot_type},
        {"sub_type", row.query.sub_type},
        {"query_text", row.query.query_text},
        {"rank_group", std::string(to_string(row.rank_group))},
        {"method", std::string(to_string(row.method))},
        {"top1_code", row.top1_code},
        {"top1_pair_id", row.top1_pair_id},
        {"top1_notebook_id", row.top1_notebook_id},
        {"top1_score", row.top1_score},
        {"auto_relevant", row.auto_relevant},
        {"human_verdict", std::string(to_string(row.human_verdict))},
    };
    j["error"] = row.error ? json(*row.error) : json(nullptr);
    return j;
}

PlotEvalRow row_from_json(const json& j) {
    auto bad = [](const std::string& what) { return Error(ErrorKind::InvalidArgument, "review row: " + what); };
    try {
        PlotEvalRow row;
        row.query.plot_type = j.at("plot_type").get<std::string>();
        row.query.sub_type = j.at("sub_type").get<std::string>();
        row.query.query_text = j.at("query_text").get<std::string>();
        const auto group = parse_group(j.at("rank_group").get<std::string>());
        const auto method = parse_method(j.at("method").get<std::string>());
        const auto verdict = parse_verdict(j.at("human_verdict").get<std::string>());
        if (!group) throw bad("unknown rank_group");
        if (!method) throw bad("unknown method");
        if (!verdict) throw bad("unknown human_verdict");
        row.rank_group = *group;
        row.method = *method;
        row.human_verdict = *verdict;
        row.top1_code = j.at("top1_code").get<std::string>();
        row.top1_pair_id = j.value("top1_pair_id", "");
        row.top1_notebook_id = j.value("top1_notebook_id", "");
        row.top1_score = j.value("top1_score", 0.0);
        row.auto_relevant = j.at("auto_relevant").get<bool>();
        if (j.contains("error") && j["error"].is_string()) row.error = j["error"].get<std::string>();
        return row;
    } catch (const json::exception& e) {
        throw bad(e.what());
    }
}

void write_review_file(std::ostream& out, std::span<const PlotEvalRow> rows) {
    for (const auto& row : rows) out << to_json(row).dump() << '\n';
    if (!out) throw Error(ErrorKind::Io, "failed writing review file");
}

std::vector<PlotEvalRow> read_review_file(std::istream& in) {
    std::vector<PlotEvalRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded()) {
            throw Error(ErrorKind::InvalidArgument, "review file line " + std::to_string(line_no) + " is not JSON");
        }
        rows.push_back(row_from_json(j));
    }
    return rows;
}

FormattedReport report(std::span<const SanityReport> sanity, std::span<const PlotEvalRow> rows) {
    FormattedReport out;
    std::ostringstream text;

    // Sanity table.
    std::vector<SanityReport> sorted_sanity(sanity.begin(), sanity.end());
    std::stable_sort(sorted_sanity.begin(), sorted_sanity.end(), [](const SanityReport& a, const SanityReport& b) {
        if (a.rank_group != b.rank_group) return a.rank_group < b.rank_group;
        return a.method < b.method;
    });
    text << "Sanity check (rank-1 exact copy)\n";
    text << pad_right("Rank", 13) << pad_right("Type", 16) << pad_left("Total Items", 12) << pad_left("Total Correct", 15)
         << pad_left("Total Correct (%)", 19) << '\n';
    json sanity_json = json::array();
    for (const auto& s : sorted_sanity) {
        text << pad_right(to_string(s.rank_group), 13) << pad_right(to_string(s.method), 16)
             << pad_left(std::to_string(s.total_items), 12) << pad_left(std::to_string(s.total_correct), 15)
             << pad_left(fixed2(s.percent_correct()), 19) << '\n';
        sanity_json.push_back({{"rank_group", std::string(to_string(s.rank_group))},
                               {"method", std::string(to_string(s.method))},
                               {"total_items", s.total_items},
                               {"total_correct", s.total_correct},
                               {"percent_correct", s.percent_correct()}});
    }

    // Plot-type grid.
    std::vector<PlotEvalRow> sorted_rows(rows.begin(), rows.end());
    std::stable_sort(sorted_rows.begin(), sorted_rows.end(), row_before);
    std::vector<std::pair<RankGroup, Method>> columns;
    {
        std::set<std::pair<RankGroup, Method>> seen;
        for (const auto& r : sorted_rows) seen.emplace(r.rank_group, r.method);
        columns.assign(seen.begin(), seen.end());
    }
    std::vector<PlotQuery> queries;
    for (const auto& r : sorted_rows) {
        if (queries.empty() || !(queries.back() == r.query)) queries.push_back(r.query);
    }
    auto column_of = [&](const PlotEvalRow& r) {
        return static_cast<std::size_t>(
            std::find(columns.begin(), columns.end(), std::make_pair(r.rank_group, r.method)) - columns.begin());
    };
    auto query_of = [&](const PlotEvalRow& r) {
        return static_cast<std::size_t>(std::find(queries.begin(), queries.end(), r.query) - queries.begin());
    };
    std::vector<std::vector<const PlotEvalRow*>> grid(queries.size(),
                                                      std::vector<const PlotEvalRow*>(columns.size(), nullptr));
    for (const auto& r : sorted_rows) grid[query_of(r)][column_of(r)] = &r;

    std::vector<std::string> headers;
    std::size_t col_width = 8;
    for (const auto& [g, m] : columns) {
        headers.push_back(std::string(to_string(g)) + "/" + std::string(to_string(m)));
        col_width = std::max(col_width, headers.back().size() + 2);
    }
    std::size_t label_width = 12;
    for (const auto& q : queries) label_width = std::max(label_width, display_width(q.sub_type) + 2);

    auto render_grid = [&](const std::string& title, auto cell_mark, auto counts) {
        text << '\n' << title << '\n' << pad_right("Plot Type", label_width);
        for (const auto& h : headers) text << pad_right(h, col_width);
        text << '\n';
        std::vector<std::size_t> totals(columns.size(), 0);
        for (std::size_t qi = 0; qi < queries.size(); ++qi) {
            text << pad_right(lower(queries[qi].sub_type), label_width);
            for (std::size_t ci = 0; ci < columns.size(); ++ci) {
                const PlotEvalRow* r = grid[qi][ci];
                text << pad_right(r ? cell_mark(*r) : "", col_width);
                if (r && counts(*r)) ++totals[ci];
            }
            text << '\n';
        }
        text << pad_right("Total Correct", label_width);
        for (auto t : totals) text << pad_right(std::to_string(t), col_width);
        text << '\n';
        return totals;
    };

    const auto auto_totals = render_grid(
        "First recommendation vs. plot type: auto_relevant (machine proxy, not a human judgment)",
        [](const PlotEvalRow& r) -> std::string { return r.error ? "ERR" : (r.auto_relevant ? "✓" : ""); },
        [](const PlotEvalRow& r) { return !r.error && r.auto_relevant; });
    const auto human_totals = render_grid(
        "First recommendation vs. plot type: human verdict (? = unjudged)",
        [](const PlotEvalRow& r) -> std::string {
            switch (r.human_verdict) {
                case HumanVerdict::Correct: return "✓";
                case HumanVerdict::Incorrect: return "";
                case HumanVerdict::Unjudged: return "?";
            }
            return "?";
        },
        [](const PlotEvalRow& r) { return r.human_verdict == HumanVerdict::Correct; });

    json columns_json = json::array();
    for (std::size_t ci = 0; ci < columns.size(); ++ci) {
        columns_json.push_back({{"rank_group", std::string(to_string(columns[ci].first))},
                                {"method", std::string(to_string(columns[ci].second))},
                                {"total_auto_relevant", auto_totals[ci]},
                                {"total_human_correct", human_totals[ci]}});
    }
    json grid_json = json::array();
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        json cells = json::array();
        for (std::size_t ci = 0; ci < columns.size(); ++ci) {
            const PlotEvalRow* r = grid[qi][ci];
            if (r == nullptr) {
                cells.push_back(nullptr);
                continue;
            }
            cells.push_back({{"auto_relevant", r->auto_relevant},
                             {"human_verdict", std::string(to_string(r->human_verdict))},
                             {"error", r->error ? json(*r->error) : json(nullptr)}});
        }
        grid_json.push_back({{"plot_type", queries[qi].plot_type},
                             {"sub_type", queries[qi].sub_type},
                             {"query_text", queries[qi].query_text},
                             {"cells", std::move(cells)}});
    }

    out.text = text.str();
    out.json = {{"sanity", std::move(sanity_json)},
                {"plot_eval", {{"columns", std::move(columns_json)}, {"rows", std::move(grid_json)}}}};
    return out;
}

}  // namespace cellrec
