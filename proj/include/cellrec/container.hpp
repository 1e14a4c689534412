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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "cellrec/notebook.hpp"

namespace cellrec {

/// On-disk layout of one index file ("CRIX1" container), little-endian:
///
///   magic      5 bytes  "CRIX1"
///   version    u16      kContainerVersion
///   section    4 bytes  "BM25" or "VECT"
///   length     u64      body size in bytes
///   body       length bytes
///   checksum   u64      FNV-1a 64 of body
inline constexpr std::string_view kContainerMagic = "CRIX1";
inline constexpr std::uint16_t kContainerVersion = 1;

enum class SectionTag { Bm25, Vector };

std::string_view section_name(SectionTag tag);

void write_container(std::ostream& out, SectionTag tag, std::string_view body);

/// Reads and validates a container; throws Error(CorruptIndex) on a bad
/// magic, version, section tag, length or checksum.
std::string read_container(std::istream& in, SectionTag expected);

class BinaryWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(std::string_view s);
    void pair(const CellPair& p);

    const std::string& data() const noexcept { return buf_; }

private:
    std::string buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string_view data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    CellPair pair();

    bool done() const noexcept { return pos_ == data_.size(); }

private:
    std::string_view take(std::size_t n);

    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace cellrec
