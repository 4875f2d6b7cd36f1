#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "devproof/bytes.hpp"
#include "devproof/field.hpp"

namespace devproof::commit {

using field::Fp;

/// Merkle root over a polynomial's evaluations on a subgroup domain.
struct Commitment {
    Digest root{};
    std::uint32_t domain_order = 0;

    friend bool operator==(const Commitment&, const Commitment&) = default;
};

/// Value at domain point j (1-based) plus its authentication path, leaf upward.
struct Opening {
    std::uint32_t index = 0;
    Fp value;
    std::vector<Digest> path;

    friend bool operator==(const Opening&, const Opening&) = default;
};

Digest leaf_hash(const Fp& value);
Digest node_hash(const Digest& left, const Digest& right);

/// Smallest power of two >= n (and >= 1).
std::uint64_t next_pow2(std::uint64_t n);

/// Binary tree over leaf hashes, padded with all-zero digests to a power of two.
class MerkleTree {
public:
    explicit MerkleTree(std::span<const Fp> leaves);

    const Digest& root() const { return levels_.back().front(); }
    std::uint32_t leaf_count() const { return static_cast<std::uint32_t>(values_.size()); }
    const std::vector<Fp>& values() const { return values_; }
    /// Opening of leaf j, 1 <= j <= leaf_count(); throws IndexError.
    Opening open(std::uint32_t j) const;

private:
    std::vector<Fp> values_;
    std::vector<std::vector<Digest>> levels_; // levels_[0] = leaves
};

/// Committed polynomial kept around by a prover so openings are cheap.
class CommittedPolynomial {
public:
    CommittedPolynomial(const field::Polynomial& poly, const field::SubgroupDomain& domain);

    Commitment commitment() const { return {tree_.root(), tree_.leaf_count()}; }
    Opening open(std::uint32_t j) const { return tree_.open(j); }
    const std::vector<Fp>& evaluations() const { return tree_.values(); }

private:
    MerkleTree tree_;
};

/// Throws DegreeError if deg(poly) >= domain order.
Commitment commit(const field::Polynomial& poly, const field::SubgroupDomain& domain);
Opening open(const field::Polynomial& poly, const field::SubgroupDomain& domain, std::uint32_t j);
/// False on any mismatch, including a path of the wrong length or an index out of range.
bool verify_opening(const Commitment& com, const Opening& opening);

void write_commitment(ByteWriter& out, const Commitment& com);
Commitment read_commitment(ByteReader& in);
void write_opening(ByteWriter& out, const Opening& op);
Opening read_opening(ByteReader& in, std::uint64_t modulus);

} // namespace devproof::commit
