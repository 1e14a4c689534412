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

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "cellrec/cli.hpp"
#include "test_support.hpp"

namespace cellrec {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cellrec");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
        ::unsetenv("CELLREC_CONFIG");
    }
    void TearDown() override { ::unsetenv("SOURCE_DATE_EPOCH"); }

    std::string index_dir() const { return (tmp_ / "index").string(); }

    CliRun build_index(const std::string& dir) {
        const auto corpus = testing::data_dir() / "corpus";
        return cli({"index", "--notebooks", (corpus / "notebooks").string(), "--manifest",
                    (corpus / "manifest.csv").string(), "--index-dir", dir, "--dim", "64"});
    }

    testing::TempDir tmp_;
};

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(cli({"index"}).code, kExitUsage);
    EXPECT_EQ(cli({"query", "x", "--method", "tfidf", "--index-dir", index_dir()}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
    EXPECT_EQ(cli({"--config", (tmp_ / "none.conf").string(), "inspect"}).code, kExitUsage);
}

TEST_F(CliTest, IndexReportsCountsAndIsReproducible) {
    const auto first = build_index(index_dir());
    ASSERT_EQ(first.code, kExitOk) << first.err;
    EXPECT_NE(first.out.find("pairs extracted: 5, plot-related: 4"), std::string::npos) << first.out;
    EXPECT_NE(first.out.find("group all: 4 pairs"), std::string::npos) << first.out;

    const auto again_dir = (tmp_ / "again").string();
    ASSERT_EQ(build_index(again_dir).code, kExitOk);
    for (const auto& entry : fs::directory_iterator(index_dir())) {
        const auto name = entry.path().filename();
        EXPECT_EQ(testing::read_file(entry.path()), testing::read_file(fs::path(again_dir) / name)) << name;
    }
    const auto manifest = testing::read_json(fs::path(index_dir()) / "manifest.json");
    EXPECT_EQ(manifest["indexes"][0]["built_at"], "2023-11-14T22:13:20Z");
    EXPECT_EQ(manifest["provider"]["dim"], 64);
}

TEST_F(CliTest, QueryReturnsScatterPairFirst) {
    ASSERT_EQ(build_index(index_dir()).code, kExitOk);
    const auto r = cli({"query", "plot data using scatter visualization", "--index-dir", index_dir(), "--json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = json::parse(r.out);
    ASSERT_FALSE(j.empty());
    EXPECT_EQ(j[0]["pair_id"], "a31b611715590931");
    EXPECT_EQ(j[0]["rank"], 1);
    EXPECT_EQ(j[0]["matched_markdown"], "Scatter plot of price against area");

    const auto text = cli({"query", "histogram", "--index-dir", index_dir(), "--k", "1", "--group", "master"});
    ASSERT_EQ(text.code, kExitOk) << text.err;
    EXPECT_NE(text.out.find("[1] score="), std::string::npos);
    EXPECT_NE(text.out.find("plt.hist(df.age, bins=20)"), std::string::npos);
    EXPECT_EQ(text.out.find("[2]"), std::string::npos);

    const auto vec = cli({"query", "ax.bar", "--index-dir", index_dir(), "--method", "vector", "--json"});
    ASSERT_EQ(vec.code, kExitOk) << vec.err;
    EXPECT_TRUE(json::parse(vec.out)[0]["matched_markdown"].is_null());

    const auto none = cli({"query", "zzzz", "--index-dir", index_dir()});
    EXPECT_EQ(none.code, kExitOk);
    EXPECT_NE(none.out.find("no recommendations"), std::string::npos);
}

TEST_F(CliTest, MissingOrCorruptIndexExitsTwo) {
    const auto missing = cli({"query", "x", "--index-dir", index_dir()});
    EXPECT_EQ(missing.code, kExitIndex);
    EXPECT_NE(missing.err.find(index_dir()), std::string::npos);

    ASSERT_EQ(build_index(index_dir()).code, kExitOk);

    const auto path = fs::path(index_dir()) / "all.bm25.crix";
    auto bytes = testing::read_file(path);
    bytes[bytes.size() - 2] ^= 0x7f;
    testing::write_file(path, bytes);
    EXPECT_EQ(cli({"query", "x", "--index-dir", index_dir()}).code, kExitIndex);
    EXPECT_EQ(cli({"sanity", "--index-dir", index_dir(), "--out", tmp_.path().string()}).code, kExitIndex);
}

TEST_F(CliTest, EmptyCorpusExitsOne) {
    const auto bad = testing::data_dir() / "corpus" / "malformed";
    const auto r = cli({"index", "--notebooks", (bad / "notebooks").string(), "--manifest",
                        (bad / "manifest.csv").string(), "--index-dir", index_dir()});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("skipped broken.ipynb"), std::string::npos);
    EXPECT_NE(r.err.find("EmptyCorpus"), std::string::npos);
}

TEST_F(CliTest, UnreachableProviderExitsThree) {
    const int port = testing::unused_port();
    testing::write_file(tmp_ / "c.conf", "provider.initial_backoff_ms = 1\nprovider.timeout_ms = 500\n");
    const auto corpus = testing::data_dir() / "corpus";
    const auto r = cli({"--config", (tmp_ / "c.conf").string(), "index", "--notebooks",
                        (corpus / "notebooks").string(), "--manifest", (corpus / "manifest.csv").string(),
                        "--index-dir", index_dir(), "--provider", "remote", "--endpoint",
                        "http://127.0.0.1:" + std::to_string(port)});
    EXPECT_EQ(r.code, kExitProvider);
    EXPECT_NE(r.err.find("4 attempts"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(fs::path(index_dir()) / "manifest.json"));
}

TEST_F(CliTest, SanityWritesReports) {
    ASSERT_EQ(build_index(index_dir()).code, kExitOk);
    const auto out = tmp_ / "reports";
    const auto r = cli({"sanity", "--index-dir", index_dir(), "--methods", "bm25,bm25-stemlemma", "--groups",
                        "all,expert", "--out", out.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("all bm25: 4/4 correct (100.00%)"), std::string::npos) << r.out;
    const auto j = testing::read_json(out / "sanity.json");
    ASSERT_EQ(j.size(), 4u);
    EXPECT_NE(testing::read_file(out / "sanity.txt").find("Total Correct (%)"), std::string::npos);
}

TEST_F(CliTest, PlotEvalWritesReviewFileAndSummarizesIt) {
    ASSERT_EQ(build_index(index_dir()).code, kExitOk);
    const auto out = tmp_ / "plot";
    const auto r = cli({"ploteval", "--index-dir", index_dir(), "--out", out.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::istringstream review(testing::read_file(out / "review.jsonl"));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(review, line)) {
        const auto j = json::parse(line);
        EXPECT_EQ(j["human_verdict"], "unjudged");
        ++rows;
    }
    EXPECT_EQ(rows, 60u);
    EXPECT_TRUE(fs::exists(out / "ploteval.txt"));
    EXPECT_EQ(testing::read_json(out / "ploteval.json")["rows"].size(), 30u);

    const auto again = cli({"ploteval", "--from-review", (out / "review.jsonl").string(), "--out",
                            (tmp_ / "summary").string()});
    EXPECT_EQ(again.code, kExitOk) << again.err;
    EXPECT_NE(again.out.find("Total Correct"), std::string::npos);

    fs::remove(fs::path(index_dir()) / "master.vector.crix");
    const auto broken = cli({"ploteval", "--index-dir", index_dir(), "--groups", "master", "--out",
                             (tmp_ / "m").string()});
    EXPECT_EQ(broken.code, kExitIndex);
}

TEST_F(CliTest, InspectPrintsManifest) {
    ASSERT_EQ(build_index(index_dir()).code, kExitOk);
    const auto r = cli({"inspect", "--index-dir", index_dir()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("all/bm25-stemlemma"), std::string::npos);
    const auto j = cli({"inspect", "--index-dir", index_dir(), "--json"});
    EXPECT_EQ(json::parse(j.out)["version"], "cellrec-index/1");
}

}  // namespace
}  // namespace cellrec
