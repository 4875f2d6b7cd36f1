#include "devproof/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace devproof {

namespace {

EVP_MD_CTX* as_ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }

} // namespace

Hasher::Hasher() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(as_ctx(ctx_), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 init failed");
}

Hasher::~Hasher() { EVP_MD_CTX_free(as_ctx(ctx_)); }

Hasher& Hasher::update(std::span<const std::uint8_t> data) {
    if (!data.empty()) EVP_DigestUpdate(as_ctx(ctx_), data.data(), data.size());
    return *this;
}

Digest Hasher::finish() {
    Digest out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(as_ctx(ctx_), out.data(), &len);
    return out;
}

Digest sha256(std::span<const std::uint8_t> data) {
    Hasher h;
    h.update(data);
    return h.finish();
}

Digest sha256(std::string_view text) {
    return sha256(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace devproof
