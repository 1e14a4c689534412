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

#include "cellrec/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "cellrec/config.hpp"
#include "cellrec/error.hpp"
#include "cellrec/eval.hpp"
#include "cellrec/notebook.hpp"
#include "cellrec/recommender.hpp"
#include "cellrec/store.hpp"

namespace cellrec {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::IndexMissing:
        case ErrorKind::IndexMismatch:
        case ErrorKind::CorruptIndex:
            return kExitIndex;
        case ErrorKind::ProviderUnavailable:
            return kExitProvider;
        default:
            return kExitUsage;
    }
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string format_score(double v) { return format_fixed(v, 6); }

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& item : raw) {
        std::size_t start = 0;
        while (start <= item.size()) {
            auto end = item.find(',', start);
            if (end == std::string::npos) end = item.size();
            if (end > start) out.push_back(item.substr(start, end - start));
            start = end + 1;
        }
    }
    return out;
}

std::vector<Method> parse_methods(const std::vector<std::string>& raw) {
    std::vector<Method> out;
    for (const auto& s : split_list(raw)) {
        const auto m = parse_method(s);
        if (!m) throw Error(ErrorKind::InvalidArgument, "unknown method '" + s + "' (bm25|bm25-stemlemma|vector)");
        if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
    return out;
}

std::vector<RankGroup> parse_groups(const std::vector<std::string>& raw) {
    std::vector<RankGroup> out;
    for (const auto& s : split_list(raw)) {
        const auto g = parse_group(s);
        if (!g) throw Error(ErrorKind::InvalidArgument, "unknown group '" + s + "' (grandmaster|master|expert|all)");
        if (std::find(out.begin(), out.end(), *g) == out.end()) out.push_back(*g);
    }
    return out;
}

void write_text_file(const fs::path& path, const std::string& data) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << data;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

// Flags shared by every verb that reads or builds indexes.
struct CommonFlags {
    std::string config_path;
    std::string index_dir;
    std::string provider;
    std::string endpoint;
    std::size_t dim = 0;
};

void add_provider_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--index-dir", f.index_dir, "Index directory (overrides index.dir)");
    cmd->add_option("--provider", f.provider, "Embedding provider")->check(CLI::IsMember({"remote", "hash"}));
    cmd->add_option("--endpoint", f.endpoint, "Embedding service base URL");
    cmd->add_option("--dim", f.dim, "Embedding dimension")->check(CLI::PositiveNumber);
}

class Cli {
public:
    Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(const std::vector<std::string>& args);

private:
    Config load_config_layers() const;
    void apply_provider_flags(EmbeddingProviderSpec& spec) const;
    EmbeddingProviderSpec query_provider(const IndexStore& store, const Config& cfg) const;

    int cmd_index();
    int cmd_query();
    int cmd_sanity();
    int cmd_ploteval();
    int cmd_inspect();

    std::ostream& out_;
    std::ostream& err_;
    CommonFlags common_;

    // index
    std::string notebooks_dir_;
    std::string manifest_csv_;
    std::optional<double> k1_;
    std::optional<double> b_;
    // query
    std::string query_text_;
    std::string method_ = "bm25";
    std::string group_ = "all";
    std::size_t k_ = 0;
    bool json_ = false;
    // sanity / ploteval
    std::vector<std::string> methods_;
    std::vector<std::string> groups_;
    std::string out_dir_ = ".";
    std::string from_review_;
};

Config Cli::load_config_layers() const {
    Config cfg;
    std::string path = common_.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) path = env;
    }
    if (!path.empty()) cfg = load_config(path, cfg);
    if (!common_.index_dir.empty()) cfg.index_dir = common_.index_dir;
    if (k1_) cfg.bm25.k1 = *k1_;
    if (b_) cfg.bm25.b = *b_;
    if (k_ > 0) cfg.default_k = k_;
    return cfg;
}

void Cli::apply_provider_flags(EmbeddingProviderSpec& spec) const {
    if (!common_.provider.empty()) {
        spec.kind = common_.provider == "remote" ? ProviderKind::RemoteService : ProviderKind::HashFallback;
    }
    if (!common_.endpoint.empty()) spec.endpoint = common_.endpoint;
    if (common_.dim > 0) spec.dim = common_.dim;
}

// The manifest records the provider the vectors were built with; config
// contributes transport tuning and flags may override the rest.
EmbeddingProviderSpec Cli::query_provider(const IndexStore& store, const Config& cfg) const {
    EmbeddingProviderSpec spec = cfg.provider;
    const auto recorded = store.provider_spec();
    spec.kind = recorded.kind;
    spec.endpoint = recorded.endpoint;
    spec.dim = recorded.dim;
    apply_provider_flags(spec);
    return spec;
}

int Cli::run(const std::vector<std::string>& args) {
    CLI::App app{"cellrec: recommend notebook code cells for a markdown description"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", common_.config_path, "Config file (default: $CELLREC_CONFIG)");

    auto* index = app.add_subcommand("index", "Ingest notebooks and build every index");
    index->add_option("--notebooks", notebooks_dir_, "Directory the manifest paths are relative to")->required();
    index->add_option("--manifest", manifest_csv_, "CSV with columns path,rank")->required();
    index->add_option("--k1", k1_, "BM25 k1");
    index->add_option("--b", b_, "BM25 b");
    add_provider_flags(index, common_);

    auto* query = app.add_subcommand("query", "Recommend code cells for a markdown text");
    query->add_option("markdown", query_text_, "Markdown text (read from stdin when omitted)");
    query->add_option("--method", method_, "bm25 | bm25-stemlemma | vector");
    query->add_option("--group", group_, "grandmaster | master | expert | all");
    query->add_option("--k", k_, "Number of recommendations")->check(CLI::PositiveNumber);
    query->add_flag("--json", json_, "Machine-readable output");
    add_provider_flags(query, common_);

    auto* sanity = app.add_subcommand("sanity", "Self-retrieval check over indexed pairs");
    sanity->add_option("--method,--methods", methods_, "Methods, comma separated")->default_str("bm25");
    sanity->add_option("--group,--groups", groups_, "Rank groups, comma separated")->default_str("all");
    sanity->add_option("--out", out_dir_, "Directory for sanity.txt and sanity.json");
    add_provider_flags(sanity, common_);

    auto* ploteval = app.add_subcommand("ploteval", "Run the plot-type query study");
    ploteval->add_option("--method,--methods", methods_, "Methods, comma separated")->default_str("bm25,vector");
    ploteval->add_option("--group,--groups", groups_, "Rank groups, comma separated")->default_str("all");
    ploteval->add_option("--out", out_dir_, "Directory for ploteval.txt, ploteval.json and review.jsonl");
    ploteval->add_option("--from-review", from_review_, "Summarize an edited review file instead of querying");
    add_provider_flags(ploteval, common_);

    auto* inspect = app.add_subcommand("inspect", "Print the index manifest");
    inspect->add_option("--index-dir", common_.index_dir, "Index directory (overrides index.dir)");
    inspect->add_flag("--json", json_, "Print the raw manifest JSON");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out_, err_);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*index) return cmd_index();
        if (*query) return cmd_query();
        if (*sanity) return cmd_sanity();
        if (*ploteval) return cmd_ploteval();
        if (*inspect) return cmd_inspect();
    } catch (const Error& e) {
        err_ << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err_ << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

int Cli::cmd_index() {
    const Config cfg = load_config_layers();
    EmbeddingProviderSpec spec = cfg.provider;
    apply_provider_flags(spec);

    const auto entries = read_ingest_manifest(manifest_csv_);
    const auto ingested = ingest_corpus(notebooks_dir_, entries, [this](const SkippedFile& s) {
        err_ << "skipped " << s.path << ": " << s.reason << '\n';
    });
    const auto plot_pairs = filter_plot_pairs(ingested.pairs, cfg.plot_keywords);
    out_ << "notebooks parsed: " << ingested.notebooks_parsed << " (skipped " << ingested.skipped.size() << ")\n"
         << "pairs extracted: " << ingested.pairs.size() << ", plot-related: " << plot_pairs.size() << '\n';
    if (plot_pairs.empty()) throw Error(ErrorKind::EmptyCorpus, "no plot-related pairs survived ingestion");

    auto provider = make_provider(spec);
    const auto build = build_corpus_indexes(plot_pairs, cfg.bm25, spec, *provider);
    const auto manifest = write_index_dir(cfg.index_dir, build, build_timestamp());

    for (const auto& [group, n] : build.group_sizes) {
        out_ << "group " << to_string(group) << ": " << n << " pairs\n";
    }
    out_ << "wrote " << manifest.entries.size() << " indexes to " << cfg.index_dir.string() << '\n';
    return kExitOk;
}

int Cli::cmd_query() {
    const Config cfg = load_config_layers();
    const auto method = parse_method(method_);
    if (!method) throw Error(ErrorKind::InvalidArgument, "unknown method '" + method_ + "'");
    const auto group = parse_group(group_);
    if (!group) throw Error(ErrorKind::InvalidArgument, "unknown group '" + group_ + "'");

    std::string text = query_text_;
    if (text.empty()) text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());

    const IndexStore store(cfg.index_dir);
    IndexSet set;
    store.load_into(set, *group, *method);
    std::unique_ptr<EmbeddingProvider> provider;
    if (*method == Method::Vector) provider = make_provider(query_provider(store, cfg));

    const auto recs = recommend(QueryRequest{text, *method, cfg.default_k, *group}, set, provider.get());
    if (json_) {
        json arr = json::array();
        for (const auto& r : recs) {
            arr.push_back({{"rank", r.rank},
                           {"score", r.score},
                           {"method", std::string(to_string(r.method))},
                           {"notebook_id", r.notebook_id},
                           {"pair_id", r.pair_id},
                           {"matched_markdown", r.matched_markdown ? json(*r.matched_markdown) : json(nullptr)},
                           {"code", r.code}});
        }
        out_ << arr.dump(2) << '\n';
        return kExitOk;
    }
    if (recs.empty()) {
        out_ << "no recommendations\n";
        return kExitOk;
    }
    for (const auto& r : recs) {
        out_ << '[' << r.rank << "] score=" << format_score(r.score) << " method=" << to_string(r.method)
             << " notebook=" << r.notebook_id << " pair=" << r.pair_id << '\n';
        if (r.matched_markdown) out_ << "--- matched markdown ---\n" << *r.matched_markdown << '\n';
        out_ << "--- code ---\n" << r.code << "\n\n";
    }
    return kExitOk;
}

int Cli::cmd_sanity() {
    const Config cfg = load_config_layers();
    const auto methods = parse_methods(methods_.empty() ? std::vector<std::string>{"bm25"} : methods_);
    const auto groups = parse_groups(groups_.empty() ? std::vector<std::string>{"all"} : groups_);
    const IndexStore store(cfg.index_dir);
    std::unique_ptr<EmbeddingProvider> provider;

    std::vector<SanityReport> reports;
    auto flush = [&] {
        const auto rep = report(reports, {});
        write_text_file(fs::path(out_dir_) / "sanity.txt", rep.text);
        write_text_file(fs::path(out_dir_) / "sanity.json", rep.json["sanity"].dump(2) + "\n");
        return rep;
    };

    for (const auto group : groups) {
        for (const auto method : methods) {
            IndexSet set;
            store.load_into(set, group, method);
            const auto& pairs = method == Method::Vector ? set.vector(group)->documents()
                                                         : set.bm25(group, method)->documents();
            if (method == Method::Vector && !provider) provider = make_provider(query_provider(store, cfg));
            try {
                reports.push_back(sanity_check(pairs, method, group, set, provider.get()));
            } catch (const Error&) {
                flush();
                throw;
            }
            const auto& r = reports.back();
            out_ << to_string(group) << ' ' << to_string(method) << ": " << r.total_correct << '/' << r.total_items
                 << " correct (" << format_fixed(r.percent_correct(), 2) << "%)\n";
        }
    }
    flush();
    return kExitOk;
}

int Cli::cmd_ploteval() {
    std::vector<PlotEvalRow> rows;
    if (!from_review_.empty()) {
        std::ifstream in(from_review_, std::ios::binary);
        if (!in) throw Error(ErrorKind::Io, "cannot read review file " + from_review_);
        rows = read_review_file(in);
    } else {
        const Config cfg = load_config_layers();
        const auto methods = parse_methods(methods_.empty() ? std::vector<std::string>{"bm25,vector"} : methods_);
        const auto groups = parse_groups(groups_.empty() ? std::vector<std::string>{"all"} : groups_);
        const IndexStore store(cfg.index_dir);
        IndexSet set;
        for (const auto group : groups) {
            for (const auto method : methods) {
                // Missing indexes surface as row-level failures.
                if (store.manifest().find(group, method) != nullptr) store.load_into(set, group, method);
            }
        }
        std::unique_ptr<EmbeddingProvider> provider;
        if (std::find(methods.begin(), methods.end(), Method::Vector) != methods.end()) {
            provider = make_provider(query_provider(store, cfg));
        }
        rows = plot_eval(generate_plot_queries(), groups, methods, set, provider.get());

        std::ostringstream review;
        write_review_file(review, rows);
        write_text_file(fs::path(out_dir_) / "review.jsonl", review.str());
    }

    const auto rep = report({}, rows);
    write_text_file(fs::path(out_dir_) / "ploteval.txt", rep.text);
    write_text_file(fs::path(out_dir_) / "ploteval.json", rep.json["plot_eval"].dump(2) + "\n");
    out_ << rep.text;

    int rc = kExitOk;
    for (const auto& row : rows) {
        if (!row.error) continue;
        err_ << "row failed (" << row.query.sub_type << ", " << to_string(row.rank_group) << ", "
             << to_string(row.method) << "): " << *row.error << '\n';
        const bool provider_failure = row.error->starts_with(to_string(ErrorKind::ProviderUnavailable));
        rc = std::max(rc, provider_failure ? static_cast<int>(kExitProvider) : static_cast<int>(kExitIndex));
    }
    return rc;
}

int Cli::cmd_inspect() {
    const Config cfg = load_config_layers();
    const IndexStore store(cfg.index_dir);
    const auto& m = store.manifest();
    if (json_) {
        out_ << to_json(m).dump(2) << '\n';
        return kExitOk;
    }
    out_ << "index dir: " << store.dir().string() << '\n'
         << "version:   " << m.version << '\n'
         << "bm25:      k1=" << m.bm25.k1 << " b=" << m.bm25.b << '\n'
         << "provider:  " << to_string(m.provider_kind) << " dim=" << m.provider_dim
         << (m.provider_endpoint.empty() ? "" : " endpoint=" + m.provider_endpoint) << '\n';
    for (const auto& e : m.entries) {
        out_ << "  " << to_string(e.group) << '/' << to_string(e.method) << "  docs=" << e.doc_count
             << "  file=" << e.file << "  built=" << e.built_at << "  sha256=" << e.digest << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Cli cli(out, err);
    return cli.run(args);
}

}  // namespace cellrec
