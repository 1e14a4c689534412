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

#include "cellrec/error.hpp"

namespace cellrec {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedNotebook: return "MalformedNotebook";
        case ErrorKind::MalformedManifest: return "MalformedManifest";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::DuplicateDocId: return "DuplicateDocId";
        case ErrorKind::UnknownDoc: return "UnknownDoc";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::ProviderUnavailable: return "ProviderUnavailable";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::EmptyIndex: return "EmptyIndex";
        case ErrorKind::IndexMissing: return "IndexMissing";
        case ErrorKind::IndexMismatch: return "IndexMismatch";
        case ErrorKind::CorruptIndex: return "CorruptIndex";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Config: return "Config";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

ProviderUnavailable::ProviderUnavailable(const std::string& message, int attempts)
    : Error(ErrorKind::ProviderUnavailable,
            message + " (after " + std::to_string(attempts) + " attempts)"),
      attempts_(attempts) {}

}  // namespace cellrec
