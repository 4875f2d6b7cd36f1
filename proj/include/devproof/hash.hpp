#pragma once

#include <initializer_list>
#include <span>
#include <string_view>

#include "devproof/bytes.hpp"

namespace devproof {

/// The project-wide 256-bit hash (SHA-256).
Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);

/// Incremental hashing over several byte ranges.
class Hasher {
public:
    Hasher();
    ~Hasher();
    Hasher(const Hasher&) = delete;
    Hasher& operator=(const Hasher&) = delete;

    Hasher& update(std::span<const std::uint8_t> data);
    Hasher& update(std::uint8_t byte) { return update(std::span<const std::uint8_t>(&byte, 1)); }
    Digest finish();

private:
    void* ctx_;
};

} // namespace devproof
