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

#include "cellrec/config.hpp"
#include "cellrec/error.hpp"
#include "test_support.hpp"

namespace cellrec {
namespace {

TEST(Config, Defaults) {
    const Config c;
    EXPECT_EQ(c.bm25.k1, 1.2);
    EXPECT_EQ(c.bm25.b, 0.75);
    EXPECT_EQ(c.provider.kind, ProviderKind::HashFallback);
    EXPECT_EQ(c.provider.dim, 256u);
    EXPECT_EQ(c.provider.max_retries, 3);
    EXPECT_EQ(c.provider.initial_backoff, std::chrono::milliseconds(500));
    EXPECT_EQ(c.default_k, 10u);
    EXPECT_EQ(c.index_dir, "cellrec-index");
    EXPECT_EQ(c.plot_keywords, default_plot_keywords());
}

TEST(Config, ParsesEveryKey) {
    const auto c = parse_config(R"(
# comment line
bm25.k1 = 1.5
bm25.b = 0.3   # trailing comment
plot.keywords = "plt., hist , #tag"
provider.kind = remote
provider.endpoint = "http://localhost:9000/v1"
provider.dim = 768
provider.max_retries = 5
provider.initial_backoff_ms = 250
provider.timeout_ms = 1000
provider.batch_size = 16
index.dir = /tmp/idx
query.k = 3
)");
    EXPECT_EQ(c.bm25, (Bm25Params{1.5, 0.3}));
    EXPECT_EQ(c.plot_keywords, (KeywordSet{"plt.", "hist", "#tag"}));
    EXPECT_EQ(c.provider.kind, ProviderKind::RemoteService);
    EXPECT_EQ(c.provider.endpoint, "http://localhost:9000/v1");
    EXPECT_EQ(c.provider.dim, 768u);
    EXPECT_EQ(c.provider.max_retries, 5);
    EXPECT_EQ(c.provider.initial_backoff, std::chrono::milliseconds(250));
    EXPECT_EQ(c.provider.timeout, std::chrono::milliseconds(1000));
    EXPECT_EQ(c.provider.batch_size, 16u);
    EXPECT_EQ(c.index_dir, "/tmp/idx");
    EXPECT_EQ(c.default_k, 3u);
}

TEST(Config, LayersOnTopOfBase) {
    Config base;
    base.default_k = 7;
    const auto c = parse_config("bm25.b = 0\n", base);
    EXPECT_EQ(c.default_k, 7u);
    EXPECT_EQ(c.bm25.b, 0.0);
}

TEST(Config, RejectsBadInput) {
    for (const char* text : {"nonsense", "unknown.key = 1", "bm25.k1 = fast", "provider.dim = -3", "provider.dim = 0",
                             "query.k = 0", "provider.kind = cloud", "plot.keywords = , ,", "index.dir = \"open"}) {
        SCOPED_TRACE(text);
        try {
            parse_config(text);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Config);
        }
    }
}

TEST(Config, LoadsFromFile) {
    testing::TempDir dir;
    testing::write_file(dir / "c.conf", "query.k = 4\n");
    EXPECT_EQ(load_config(dir / "c.conf").default_k, 4u);
    EXPECT_THROW(load_config(dir / "missing.conf"), Error);
}

}  // namespace
}  // namespace cellrec
