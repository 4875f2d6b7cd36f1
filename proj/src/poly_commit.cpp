#include "devproof/poly_commit.hpp"

#include <string>

#include "devproof/error.hpp"
#include "devproof/hash.hpp"

namespace devproof::commit {

namespace {

constexpr std::uint8_t kLeafPrefix = 0x00;
constexpr std::uint8_t kNodePrefix = 0x01;

std::uint32_t path_length(std::uint64_t leaves) {
    std::uint32_t depth = 0;
    while ((std::uint64_t{1} << depth) < leaves) ++depth;
    return depth;
}

std::vector<Fp> evaluations_on(const field::Polynomial& poly, const field::SubgroupDomain& domain) {
    if (poly.degree() >= static_cast<long>(domain.order()))
        throw Error(ErrorKind::DegreeError, "degree " + std::to_string(poly.degree()) + " does not fit domain of order " +
                                                std::to_string(domain.order()));
    std::vector<Fp> evals;
    evals.reserve(domain.order());
    for (const auto& x : domain.elements()) evals.push_back(poly.evaluate(x));
    return evals;
}

} // namespace

Digest leaf_hash(const Fp& value) {
    Hasher h;
    h.update(kLeafPrefix);
    h.update(field::element_bytes(value));
    return h.finish();
}

Digest node_hash(const Digest& left, const Digest& right) {
    Hasher h;
    h.update(kNodePrefix);
    h.update(left);
    h.update(right);
    return h.finish();
}

std::uint64_t next_pow2(std::uint64_t n) {
    std::uint64_t v = 1;
    while (v < n) v <<= 1;
    return v;
}

MerkleTree::MerkleTree(std::span<const Fp> leaves) : values_(leaves.begin(), leaves.end()) {
    if (values_.empty()) throw Error(ErrorKind::IndexError, "merkle tree needs at least one leaf");
    std::vector<Digest> level(next_pow2(values_.size()), Digest{});
    for (std::size_t i = 0; i < values_.size(); ++i) level[i] = leaf_hash(values_[i]);
    levels_.push_back(std::move(level));
    while (levels_.back().size() > 1) {
        const auto& below = levels_.back();
        std::vector<Digest> up(below.size() / 2);
        for (std::size_t i = 0; i < up.size(); ++i) up[i] = node_hash(below[2 * i], below[2 * i + 1]);
        levels_.push_back(std::move(up));
    }
}

Opening MerkleTree::open(std::uint32_t j) const {
    if (j < 1 || j > values_.size())
        throw Error(ErrorKind::IndexError, "opening index " + std::to_string(j) + " outside [1, " +
                                               std::to_string(values_.size()) + "]");
    Opening op{j, values_[j - 1], {}};
    std::size_t pos = j - 1;
    for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
        op.path.push_back(levels_[lvl][pos ^ 1]);
        pos >>= 1;
    }
    return op;
}

CommittedPolynomial::CommittedPolynomial(const field::Polynomial& poly, const field::SubgroupDomain& domain)
    : tree_(evaluations_on(poly, domain)) {}

Commitment commit(const field::Polynomial& poly, const field::SubgroupDomain& domain) {
    return CommittedPolynomial(poly, domain).commitment();
}

Opening open(const field::Polynomial& poly, const field::SubgroupDomain& domain, std::uint32_t j) {
    if (j < 1 || j > domain.order())
        throw Error(ErrorKind::IndexError, "opening index " + std::to_string(j) + " outside [1, " +
                                               std::to_string(domain.order()) + "]");
    return CommittedPolynomial(poly, domain).open(j);
}

bool verify_opening(const Commitment& com, const Opening& opening) {
    if (opening.index < 1 || opening.index > com.domain_order) return false;
    if (opening.path.size() != path_length(com.domain_order)) return false;
    Digest acc = leaf_hash(opening.value);
    std::size_t pos = opening.index - 1;
    for (const auto& sibling : opening.path) {
        acc = (pos & 1) ? node_hash(sibling, acc) : node_hash(acc, sibling);
        pos >>= 1;
    }
    return acc == com.root;
}

void write_commitment(ByteWriter& out, const Commitment& com) {
    out.digest(com.root);
    out.u32(com.domain_order);
}

Commitment read_commitment(ByteReader& in) {
    Commitment com;
    com.root = in.digest();
    com.domain_order = in.u32();
    return com;
}

void write_opening(ByteWriter& out, const Opening& op) {
    out.u32(op.index);
    field::write_element(out, op.value);
    out.u8(static_cast<std::uint8_t>(op.path.size()));
    for (const auto& d : op.path) out.digest(d);
}

Opening read_opening(ByteReader& in, std::uint64_t modulus) {
    Opening op;
    op.index = in.u32();
    op.value = field::read_element(in, modulus);
    const auto len = in.u8();
    for (std::uint8_t i = 0; i < len; ++i) op.path.push_back(in.digest());
    return op;
}

} // namespace devproof::commit
