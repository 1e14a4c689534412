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

#include "cellrec/container.hpp"
#include "cellrec/digest.hpp"
#include "cellrec/error.hpp"
#include "cellrec/store.hpp"
#include "test_support.hpp"

namespace cellrec {
namespace {

namespace fs = std::filesystem;
using testing::make_pair;

TEST(Digest, KnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Container, LayoutAndRoundTrip) {
    std::stringstream ss;
    write_container(ss, SectionTag::Bm25, "hello");
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 5u + 2 + 4 + 8 + 5 + 8);
    EXPECT_EQ(bytes.substr(0, 5), "CRIX1");
    EXPECT_EQ(bytes[5], '\x01');
    EXPECT_EQ(bytes[6], '\x00');
    EXPECT_EQ(bytes.substr(7, 4), "BM25");
    EXPECT_EQ(bytes[11], '\x05');
    EXPECT_EQ(bytes.substr(19, 5), "hello");
    const std::uint64_t sum = fnv1a64("hello");
    for (int i = 0; i < 8; ++i) EXPECT_EQ(static_cast<unsigned char>(bytes[24 + i]), (sum >> (8 * i)) & 0xff);
    std::istringstream in(bytes);
    EXPECT_EQ(read_container(in, SectionTag::Bm25), "hello");
}

TEST(Container, RejectsDamage) {
    std::stringstream ss;
    write_container(ss, SectionTag::Vector, "payload bytes");
    const std::string bytes = ss.str();
    auto expect_corrupt = [](const std::string& data, SectionTag tag) {
        std::istringstream in(data);
        try {
            read_container(in, tag);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::CorruptIndex);
        }
    };
    expect_corrupt(bytes, SectionTag::Bm25);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        std::string bad = bytes;
        bad[i] ^= 0x20;
        expect_corrupt(bad, SectionTag::Vector);
    }
    for (std::size_t n = 0; n < bytes.size(); ++n) expect_corrupt(bytes.substr(0, n), SectionTag::Vector);
}

TEST(BinaryIo, RoundTripAndTruncation) {
    BinaryWriter w;
    w.u8(7);
    w.u32(0xdeadbeef);
    w.u64(1ULL << 40);
    w.f64(-0.1);
    w.str(std::string_view("a\0b", 3));
    w.pair(make_pair("id", "md", "code", AuthorRank::Master, "nb", 9));
    BinaryReader r(w.data());
    EXPECT_EQ(r.u8(), 7);
    EXPECT_EQ(r.u32(), 0xdeadbeefu);
    EXPECT_EQ(r.u64(), 1ULL << 40);
    EXPECT_EQ(r.f64(), -0.1);
    EXPECT_EQ(r.str(), std::string("a\0b", 3));
    EXPECT_EQ(r.pair(), make_pair("id", "md", "code", AuthorRank::Master, "nb", 9));
    EXPECT_TRUE(r.done());
    EXPECT_THROW(r.u8(), Error);
}

std::vector<CellPair> corpus() {
    return {make_pair("a1", "Scatter plot of x", "plt.scatter(x, y)", AuthorRank::GrandMaster),
            make_pair("b2", "Histogram of y", "plt.hist(y)", AuthorRank::Expert),
            make_pair("c3", "Pie chart", "plt.pie(s)", AuthorRank::Other)};
}

TEST(BuildCorpusIndexes, GroupsAndMethods) {
    HashEmbeddingProvider hp(32);
    EmbeddingProviderSpec spec;
    spec.dim = 32;
    const auto pairs = corpus();
    const auto build = build_corpus_indexes(pairs, {}, spec, hp);
    EXPECT_EQ(build.keys.size(), 9u);
    ASSERT_EQ(build.group_sizes.size(), 3u);
    EXPECT_EQ(build.group_sizes.back(), std::make_pair(RankGroup::All, std::size_t{3}));
    EXPECT_TRUE(build.indexes.has(RankGroup::GrandMaster, Method::Vector));
    EXPECT_FALSE(build.indexes.has(RankGroup::Master, Method::Bm25));
    EXPECT_EQ(build.indexes.bm25(RankGroup::All, Method::Bm25StemLemma)->preprocess(), Preprocess::StemLemma);
    try {
        build_corpus_indexes({}, {}, spec, hp);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
    }
}

TEST(IndexStore, WriteThenLoadEverything) {
    testing::TempDir dir;
    HashEmbeddingProvider hp(32);
    EmbeddingProviderSpec spec;
    spec.dim = 32;
    const auto pairs = corpus();
    const auto build = build_corpus_indexes(pairs, Bm25Params{1.1, 0.5}, spec, hp);
    const auto written = write_index_dir(dir.path(), build, "2026-01-01T00:00:00Z");
    EXPECT_FALSE(fs::exists(dir / ".lock"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    EXPECT_EQ(written.entries.size(), 9u);

    const IndexStore store(dir.path());
    EXPECT_EQ(store.manifest().bm25, (Bm25Params{1.1, 0.5}));
    EXPECT_EQ(store.provider_spec().dim, 32u);
    EXPECT_EQ(store.provider_spec().kind, ProviderKind::HashFallback);
    IndexSet set;
    for (const auto& e : store.manifest().entries) {
        EXPECT_EQ(e.built_at, "2026-01-01T00:00:00Z");
        EXPECT_EQ(e.digest, sha256_hex(testing::read_file(dir / e.file)));
        store.load_into(set, e.group, e.method);
    }
    const auto* ix = set.bm25(RankGroup::All, Method::Bm25);
    ASSERT_NE(ix, nullptr);
    const auto a = ix->top_k(tokenize("scatter"), 3);
    const auto b = build.indexes.bm25(RankGroup::All, Method::Bm25)->top_k(tokenize("scatter"), 3);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(a[0].score, b[0].score);

    try {
        store.load_into(set, RankGroup::Master, Method::Bm25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexMissing);
    }
}

TEST(IndexStore, ManifestJsonRoundTrip) {
    IndexManifest m;
    m.provider_kind = ProviderKind::RemoteService;
    m.provider_endpoint = "http://h:1";
    m.provider_dim = 768;
    m.entries.push_back(IndexEntry{RankGroup::Expert, Method::Vector, "expert.vector.crix", 4, "t", "d"});
    const auto back = manifest_from_json(to_json(m));
    EXPECT_EQ(back.provider_kind, ProviderKind::RemoteService);
    EXPECT_EQ(back.provider_endpoint, "http://h:1");
    ASSERT_EQ(back.entries.size(), 1u);
    EXPECT_EQ(back.entries[0].file, "expert.vector.crix");
    EXPECT_NE(back.find(RankGroup::Expert, Method::Vector), nullptr);
    EXPECT_EQ(back.find(RankGroup::All, Method::Vector), nullptr);

    auto j = to_json(m);
    j["indexes"][0]["file"] = "../escape";
    EXPECT_THROW(manifest_from_json(j), Error);
    j = to_json(m);
    j["version"] = "cellrec-index/99";
    EXPECT_THROW(manifest_from_json(j), Error);
}

TEST(IndexStore, DetectsMissingAndCorruptFiles) {
    testing::TempDir dir;
    try {
        IndexStore s(dir / "absent");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexMissing);
        EXPECT_NE(std::string(e.what()).find("absent"), std::string::npos);
    }
    try {
        IndexStore s(dir.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexMissing);
    }

    HashEmbeddingProvider hp(8);
    EmbeddingProviderSpec spec;
    spec.dim = 8;
    const auto pairs = corpus();
    write_index_dir(dir.path(), build_corpus_indexes(pairs, {}, spec, hp), "t");
    auto bytes = testing::read_file(dir / "all.bm25.crix");
    bytes[bytes.size() / 2] ^= 1;
    testing::write_file(dir / "all.bm25.crix", bytes);
    const IndexStore store(dir.path());
    IndexSet set;
    try {
        store.load_into(set, RankGroup::All, Method::Bm25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CorruptIndex);
    }
    fs::remove(dir / "all.vector.crix");
    try {
        store.load_into(set, RankGroup::All, Method::Vector);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexMissing);
    }
    testing::write_file(dir / "manifest.json", "{not json");
    try {
        IndexStore s(dir.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CorruptIndex);
    }
}

TEST(IndexStore, LockBlocksConcurrentWriter) {
    testing::TempDir dir;
    testing::write_file(dir / ".lock", "");
    HashEmbeddingProvider hp(8);
    EmbeddingProviderSpec spec;
    spec.dim = 8;
    const auto pairs = corpus();
    EXPECT_THROW(write_index_dir(dir.path(), build_corpus_indexes(pairs, {}, spec, hp), "t"), Error);
    EXPECT_FALSE(fs::exists(dir / "manifest.json"));
}

TEST(BuildTimestamp, HonorsSourceDateEpoch) {
    ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
    EXPECT_EQ(build_timestamp(), "1970-01-02T00:00:00Z");
    ::unsetenv("SOURCE_DATE_EPOCH");
    EXPECT_EQ(build_timestamp().size(), 20u);
}

}  // namespace
}  // namespace cellrec
