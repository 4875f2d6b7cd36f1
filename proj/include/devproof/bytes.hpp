#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "devproof/error.hpp"

namespace devproof {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

/// Big-endian append-only encoder used for every canonical wire format.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(std::span<const std::uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void digest(const Digest& d) { raw(d); }
    /// 4-byte length prefix, then the bytes.
    void blob(std::span<const std::uint8_t> data);
    void str(std::string_view s);

    const Bytes& bytes() const& { return buf_; }
    Bytes take() && { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Strict decoder: every read past the end throws EncodingError.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    Digest digest();
    std::span<const std::uint8_t> raw(std::size_t n);
    std::span<const std::uint8_t> blob();
    std::string str();

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    /// Throws unless every byte was consumed.
    void expect_done() const;

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

} // namespace devproof
