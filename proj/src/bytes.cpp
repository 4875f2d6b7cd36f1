#include "devproof/bytes.hpp"

#include <algorithm>

namespace devproof {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DomainUnavailable: return "DomainUnavailable";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::NotInSubgroup: return "NotInSubgroup";
    case ErrorKind::NonCausalGate: return "NonCausalGate";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DegreeError: return "DegreeError";
    case ErrorKind::IndexError: return "IndexError";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::RefuseToProve: return "RefuseToProve";
    case ErrorKind::SequenceError: return "SequenceError";
    case ErrorKind::LinkError: return "LinkError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::InsufficientFunds: return "InsufficientFunds";
    case ErrorKind::DuplicateSession: return "DuplicateSession";
    case ErrorKind::UnknownSession: return "UnknownSession";
    case ErrorKind::StateError: return "StateError";
    case ErrorKind::Unauthorized: return "Unauthorized";
    case ErrorKind::EncodingError: return "EncodingError";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::ProtocolViolation: return "ProtocolViolation";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

void ByteWriter::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::blob(std::span<const std::uint8_t> data) {
    u32(static_cast<std::uint32_t>(data.size()));
    raw(data);
}

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorKind::EncodingError, "truncated input");
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
}

Digest ByteReader::digest() {
    need(32);
    Digest d{};
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), 32, d.begin());
    pos_ += 32;
    return d;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::span<const std::uint8_t> ByteReader::blob() {
    const std::uint32_t n = u32();
    return raw(n);
}

std::string ByteReader::str() {
    auto s = blob();
    return {s.begin(), s.end()};
}

void ByteReader::expect_done() const {
    if (!done()) throw Error(ErrorKind::EncodingError, "trailing bytes");
}

std::string to_hex(std::span<const std::uint8_t> data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(ErrorKind::EncodingError, "bad hex digit");
    };
    if (hex.size() % 2 != 0) throw Error(ErrorKind::EncodingError, "odd hex length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

} // namespace devproof
