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

#include "cellrec/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "cellrec/error.hpp"

namespace cellrec {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view v, std::size_t line_no) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
    if (!v.empty() && v.front() == '"') {
        throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": unterminated string");
    }
    return std::string(v);
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

double to_double(const std::string& v, std::string_view key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::Config, std::string(key) + ": expected a number, got '" + v + "'");
}

std::size_t to_size(const std::string& v, std::string_view key) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw Error(ErrorKind::Config, std::string(key) + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

}  // namespace

Config parse_config(std::string_view text, Config base) {
    Config cfg = std::move(base);
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value = unquote(trim(line.substr(eq + 1)), line_no);

        if (key == "bm25.k1") {
            cfg.bm25.k1 = to_double(value, key);
        } else if (key == "bm25.b") {
            cfg.bm25.b = to_double(value, key);
        } else if (key == "plot.keywords") {
            KeywordSet kws;
            std::size_t start = 0;
            while (start <= value.size()) {
                auto end = value.find(',', start);
                if (end == std::string::npos) end = value.size();
                const auto kw = trim(std::string_view(value).substr(start, end - start));
                if (!kw.empty()) kws.emplace_back(kw);
                start = end + 1;
            }
            if (kws.empty()) throw Error(ErrorKind::Config, "plot.keywords must not be empty");
            cfg.plot_keywords = std::move(kws);
        } else if (key == "provider.kind") {
            if (value == "hash") {
                cfg.provider.kind = ProviderKind::HashFallback;
            } else if (value == "remote") {
                cfg.provider.kind = ProviderKind::RemoteService;
            } else {
                throw Error(ErrorKind::Config, "provider.kind must be hash or remote");
            }
        } else if (key == "provider.endpoint") {
            cfg.provider.endpoint = value;
        } else if (key == "provider.dim") {
            cfg.provider.dim = to_size(value, key);
        } else if (key == "provider.max_retries") {
            cfg.provider.max_retries = static_cast<int>(to_size(value, key));
        } else if (key == "provider.initial_backoff_ms") {
            cfg.provider.initial_backoff = std::chrono::milliseconds(to_size(value, key));
        } else if (key == "provider.timeout_ms") {
            cfg.provider.timeout = std::chrono::milliseconds(to_size(value, key));
        } else if (key == "provider.batch_size") {
            cfg.provider.batch_size = to_size(value, key);
        } else if (key == "index.dir") {
            cfg.index_dir = value;
        } else if (key == "query.k") {
            cfg.default_k = to_size(value, key);
        } else {
            throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (cfg.provider.dim == 0) throw Error(ErrorKind::Config, "provider.dim must be positive");
    if (cfg.default_k == 0) throw Error(ErrorKind::Config, "query.k must be positive");
    return cfg;
}

Config load_config(const std::filesystem::path& path, Config base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

}  // namespace cellrec
