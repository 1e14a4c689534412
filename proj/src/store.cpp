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

#include "cellrec/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "cellrec/digest.hpp"
#include "cellrec/error.hpp"

namespace cellrec {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class DirLock {
public:
    explicit DirLock(fs::path path) : path_(std::move(path)) {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            if (errno == EEXIST) {
                throw Error(ErrorKind::Io, "index directory is locked by another writer (remove " + path_.string() +
                                               " if it is stale)");
            }
            throw Error(ErrorKind::Io, "cannot create lock " + path_.string() + ": " + std::strerror(errno));
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;
    ~DirLock() {
        ::close(fd_);
        std::error_code ec;
        fs::remove(path_, ec);
    }

private:
    fs::path path_;
    int fd_ = -1;
};

void write_atomically(const fs::path& target, const std::string& bytes) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string file_name(RankGroup group, Method method) {
    return std::string(to_string(group)) + "." + std::string(to_string(method)) + ".crix";
}

}  // namespace

const IndexEntry* IndexManifest::find(RankGroup group, Method method) const {
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const IndexEntry& e) { return e.group == group && e.method == method; });
    return it == entries.end() ? nullptr : &*it;
}

json to_json(const IndexManifest& m) {
    json entries = json::array();
    for (const auto& e : m.entries) {
        entries.push_back({{"group", std::string(to_string(e.group))},
                           {"method", std::string(to_string(e.method))},
                           {"file", e.file},
                           {"doc_count", e.doc_count},
                           {"built_at", e.built_at},
                           {"digest", e.digest}});
    }
    return {{"version", m.version},
            {"bm25", {{"k1", m.bm25.k1}, {"b", m.bm25.b}}},
            {"provider",
             {{"kind", std::string(to_string(m.provider_kind))},
              {"endpoint", m.provider_endpoint},
              {"dim", m.provider_dim}}},
            {"indexes", std::move(entries)}};
}

IndexManifest manifest_from_json(const json& j) {
    try {
        IndexManifest m;
        m.version = j.at("version").get<std::string>();
        if (m.version != kManifestVersion) {
            throw Error(ErrorKind::CorruptIndex, "unsupported manifest version " + m.version);
        }
        m.bm25.k1 = j.at("bm25").at("k1").get<double>();
        m.bm25.b = j.at("bm25").at("b").get<double>();
        const auto& p = j.at("provider");
        const auto kind = p.at("kind").get<std::string>();
        if (kind != "hash" && kind != "remote") throw Error(ErrorKind::CorruptIndex, "bad provider kind " + kind);
        m.provider_kind = kind == "remote" ? ProviderKind::RemoteService : ProviderKind::HashFallback;
        m.provider_endpoint = p.at("endpoint").get<std::string>();
        m.provider_dim = p.at("dim").get<std::size_t>();
        for (const auto& e : j.at("indexes")) {
            IndexEntry entry;
            const auto group = parse_group(e.at("group").get<std::string>());
            const auto method = parse_method(e.at("method").get<std::string>());
            if (!group || !method) throw Error(ErrorKind::CorruptIndex, "bad manifest entry " + e.dump());
            entry.group = *group;
            entry.method = *method;
            entry.file = e.at("file").get<std::string>();
            if (entry.file.find('/') != std::string::npos || entry.file.starts_with(".")) {
                throw Error(ErrorKind::CorruptIndex, "manifest file name escapes the index directory");
            }
            entry.doc_count = e.at("doc_count").get<std::size_t>();
            entry.built_at = e.at("built_at").get<std::string>();
            entry.digest = e.at("digest").get<std::string>();
            m.entries.push_back(std::move(entry));
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::CorruptIndex, std::string("malformed manifest: ") + e.what());
    }
}

CorpusBuild build_corpus_indexes(std::span<const CellPair> pairs, const Bm25Params& bm25,
                                 const EmbeddingProviderSpec& spec, EmbeddingProvider& provider) {
    if (pairs.empty()) throw Error(ErrorKind::EmptyCorpus, "no pairs to index");
    CorpusBuild build;
    build.bm25 = bm25;
    build.provider = spec;

    std::vector<std::pair<RankGroup, std::vector<CellPair>>> groups;
    for (auto& [rank, bucket] : partition_by_rank(pairs)) {
        const auto group = group_of(rank);
        if (group && !bucket.empty()) groups.emplace_back(*group, std::move(bucket));
    }
    groups.emplace_back(RankGroup::All, std::vector<CellPair>(pairs.begin(), pairs.end()));

    for (const auto& [group, members] : groups) {
        build.group_sizes.emplace_back(group, members.size());
        build.indexes.put(group, Method::Bm25, Bm25Index::build(members, bm25, Preprocess::Plain));
        build.indexes.put(group, Method::Bm25StemLemma, Bm25Index::build(members, bm25, Preprocess::StemLemma));
        build.indexes.put(group, VectorIndex::build(members, provider));
        for (const auto method : {Method::Bm25, Method::Bm25StemLemma, Method::Vector}) {
            build.keys.emplace_back(group, method);
        }
    }
    std::sort(build.keys.begin(), build.keys.end());
    return build;
}

IndexManifest write_index_dir(const fs::path& dir, const CorpusBuild& build, const std::string& built_at) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    DirLock lock(dir / ".lock");

    IndexManifest manifest;
    manifest.bm25 = build.bm25;
    manifest.provider_kind = build.provider.kind;
    manifest.provider_endpoint = build.provider.endpoint;
    manifest.provider_dim = build.provider.dim;

    for (const auto& [group, method] : build.keys) {
        std::ostringstream bytes;
        std::size_t docs = 0;
        if (method == Method::Vector) {
            const auto* ix = build.indexes.vector(group);
            ix->save(bytes);
            docs = ix->size();
        } else {
            const auto* ix = build.indexes.bm25(group, method);
            ix->save(bytes);
            docs = ix->size();
        }
        const std::string data = bytes.str();
        IndexEntry entry{group, method, file_name(group, method), docs, built_at, sha256_hex(data)};
        write_atomically(dir / entry.file, data);
        manifest.entries.push_back(std::move(entry));
    }
    write_atomically(dir / kManifestFile, to_json(manifest).dump(2) + "\n");
    return manifest;
}

std::string build_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (end != nullptr && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

IndexStore::IndexStore(fs::path dir) : dir_(std::move(dir)) {
    const fs::path manifest_path = dir_ / kManifestFile;
    if (!fs::is_directory(dir_)) throw Error(ErrorKind::IndexMissing, "index directory not found: " + dir_.string());
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IndexMissing, "index manifest not found: " + manifest_path.string());
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw Error(ErrorKind::CorruptIndex, "manifest is not JSON: " + manifest_path.string());
    manifest_ = manifest_from_json(j);
}

std::string IndexStore::read_verified(const IndexEntry& entry) const {
    const fs::path path = dir_ / entry.file;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IndexMissing, "index file not found: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string data = ss.str();
    if (sha256_hex(data) != entry.digest) {
        throw Error(ErrorKind::CorruptIndex, "digest mismatch for " + path.string());
    }
    return data;
}

void IndexStore::load_into(IndexSet& set, RankGroup group, Method method) const {
    const IndexEntry* entry = manifest_.find(group, method);
    if (entry == nullptr) {
        throw Error(ErrorKind::IndexMissing, "no " + std::string(to_string(method)) + " index for group " +
                                                 std::string(to_string(group)) + " in " + dir_.string());
    }
    std::istringstream in(read_verified(*entry));
    if (method == Method::Vector) {
        set.put(group, VectorIndex::load(in));
    } else {
        auto ix = Bm25Index::load(in);
        if (ix.preprocess() != preprocess_for(method)) {
            throw Error(ErrorKind::CorruptIndex, entry->file + " holds the wrong preprocessing variant");
        }
        set.put(group, method, std::move(ix));
    }
}

EmbeddingProviderSpec IndexStore::provider_spec() const {
    EmbeddingProviderSpec spec;
    spec.kind = manifest_.provider_kind;
    spec.endpoint = manifest_.provider_endpoint;
    spec.dim = manifest_.provider_dim;
    return spec;
}

}  // namespace cellrec
