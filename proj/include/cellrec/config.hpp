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
#include <string_view>

#include "cellrec/bm25.hpp"
#include "cellrec/notebook.hpp"
#include "cellrec/vector.hpp"

namespace cellrec {

/// Tool configuration. Defaults are overridden by the config file, which is
/// overridden by command-line flags.
///
/// The file is flat `key = value` text; `#` starts a comment, values may be
/// double-quoted, lists are comma-separated. Recognized keys:
///
///   bm25.k1                    (1.2)
///   bm25.b                     (0.75)
///   plot.keywords              (matplotlib, plt., plot, chart, seaborn, hist, scatter, pie, boxplot)
///   provider.kind              hash | remote (hash)
///   provider.endpoint          http://host:port[/prefix]
///   provider.dim               (256)
///   provider.max_retries       (3)
///   provider.initial_backoff_ms (500)
///   provider.timeout_ms        (30000)
///   provider.batch_size        (64)
///   index.dir                  (cellrec-index)
///   query.k                    (10)
struct Config {
    Bm25Params bm25;
    KeywordSet plot_keywords = default_plot_keywords();
    EmbeddingProviderSpec provider;
    std::filesystem::path index_dir = "cellrec-index";
    std::size_t default_k = 10;
};

/// Applies the settings in `text` on top of `base`. Throws Error(Config) on
/// unknown keys or malformed values.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

/// Environment variable naming a config file when --config is not given.
inline constexpr const char* kConfigEnvVar = "CELLREC_CONFIG";

}  // namespace cellrec
