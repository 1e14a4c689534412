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

#include "cellrec/container.hpp"

#include <bit>
#include <istream>
#include <iterator>
#include <ostream>

#include "cellrec/digest.hpp"
#include "cellrec/error.hpp"

namespace cellrec {

namespace {

template <typename T>
void put_le(std::string& buf, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

template <typename T>
T get_le(std::string_view bytes) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<T>(static_cast<std::uint8_t>(bytes[i])) << (8 * i);
    }
    return v;
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorKind::CorruptIndex, what); }

}  // namespace

std::string_view section_name(SectionTag tag) {
    return tag == SectionTag::Bm25 ? "BM25" : "VECT";
}

void write_container(std::ostream& out, SectionTag tag, std::string_view body) {
    std::string header(kContainerMagic);
    put_le<std::uint16_t>(header, kContainerVersion);
    header += section_name(tag);
    put_le<std::uint64_t>(header, body.size());
    std::string trailer;
    put_le<std::uint64_t>(trailer, fnv1a64(body));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
    if (!out) throw Error(ErrorKind::Io, "failed writing index container");
}

std::string read_container(std::istream& in, SectionTag expected) {
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t header_len = kContainerMagic.size() + 2 + 4 + 8;
    if (bytes.size() < header_len + 8) corrupt("file too short for a CRIX1 container");

    std::string_view view(bytes);
    if (view.substr(0, kContainerMagic.size()) != kContainerMagic) corrupt("bad magic");
    const auto version = get_le<std::uint16_t>(view.substr(kContainerMagic.size()));
    if (version != kContainerVersion) corrupt("unsupported container version " + std::to_string(version));
    const auto section = view.substr(kContainerMagic.size() + 2, 4);
    if (section != section_name(expected)) {
        corrupt("expected section " + std::string(section_name(expected)) + ", found " + std::string(section));
    }
    const auto length = get_le<std::uint64_t>(view.substr(kContainerMagic.size() + 6));
    if (length != bytes.size() - header_len - 8) corrupt("body length mismatch");
    const auto body = view.substr(header_len, length);
    if (get_le<std::uint64_t>(view.substr(header_len + length)) != fnv1a64(body)) corrupt("checksum mismatch");
    return std::string(body);
}

void BinaryWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void BinaryWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
}

void BinaryWriter::pair(const CellPair& p) {
    str(p.pair_id);
    str(p.notebook_id);
    u8(static_cast<std::uint8_t>(p.author_rank));
    u64(p.position);
    str(p.markdown);
    str(p.code);
}

std::string_view BinaryReader::take(std::size_t n) {
    if (n > data_.size() - pos_) corrupt("truncated section body");
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t BinaryReader::u8() { return static_cast<std::uint8_t>(take(1)[0]); }
std::uint32_t BinaryReader::u32() { return get_le<std::uint32_t>(take(4)); }
std::uint64_t BinaryReader::u64() { return get_le<std::uint64_t>(take(8)); }
double BinaryReader::f64() { return std::bit_cast<double>(get_le<std::uint64_t>(take(8))); }

std::string BinaryReader::str() {
    const auto n = u64();
    return std::string(take(n));
}

CellPair BinaryReader::pair() {
    CellPair p;
    p.pair_id = str();
    p.notebook_id = str();
    const auto rank = u8();
    if (rank > static_cast<std::uint8_t>(AuthorRank::Other)) corrupt("bad author rank");
    p.author_rank = static_cast<AuthorRank>(rank);
    p.position = u64();
    p.markdown = str();
    p.code = str();
    return p;
}

}  // namespace cellrec
