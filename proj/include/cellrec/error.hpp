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

#include <stdexcept>
#include <string>
#include <string_view>

namespace cellrec {

enum class ErrorKind {
    MalformedNotebook,
    MalformedManifest,
    EmptyCorpus,
    DuplicateDocId,
    UnknownDoc,
    DimensionMismatch,
    ZeroVector,
    ProviderUnavailable,
    EmptyInput,
    EmptyIndex,
    IndexMissing,
    IndexMismatch,
    CorruptIndex,
    InvalidArgument,
    Config,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised after the embedding service could not be reached; `attempts`
/// counts every request issued including retries.
class ProviderUnavailable : public Error {
public:
    ProviderUnavailable(const std::string& message, int attempts);

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

}  // namespace cellrec
