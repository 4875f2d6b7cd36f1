#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "devproof/bytes.hpp"
#include "devproof/error.hpp"
#include "devproof/field.hpp"
#include "devproof/poly_commit.hpp"
#include "devproof/r1cs.hpp"

namespace devproof::fc {

using commit::Commitment;
using commit::Opening;
using field::Fp;
using field::Polynomial;
using field::SubgroupDomain;

inline constexpr std::uint32_t kMaxConstraints = 1u << 12;

/// H has order n_hat with generator omega; K has order m_hat with generator gamma.
struct PublicParams {
    std::uint64_t modulus = field::kRuntimePrime;
    std::uint32_t lambda = 128;
    SubgroupDomain h;
    SubgroupDomain k;

    std::uint32_t n_hat() const { return static_cast<std::uint32_t>(h.order()); }
    std::uint32_t m_hat() const { return static_cast<std::uint32_t>(k.order()); }
    const Fp& omega() const { return h.generator(); }
    const Fp& gamma() const { return k.generator(); }
};

/// Row/Col/Val for one matrix: Row(gamma^j) = omega^{r_j}, Col(gamma^j) = omega^{c_j},
/// Val(gamma^j) = v_j over the entry list padded with (n_hat, 1, 0).
struct MatrixEncoding {
    std::vector<r1cs::Entry> padded;
    Polynomial row;
    Polynomial col;
    Polynomial val;
    std::vector<Fp> row_evals;
    std::vector<Fp> col_evals;
    std::vector<Fp> val_evals;
};

struct ProvingKey {
    PublicParams pp;
    r1cs::Instance instance;
    std::array<MatrixEncoding, 3> encodings;
    /// Digest of the matching verification key; proofs are bound to it.
    Digest vk_digest{};
};

struct MatrixCommitment {
    Commitment row;
    Commitment col;
    Commitment val;

    friend bool operator==(const MatrixCommitment&, const MatrixCommitment&) = default;
};

struct VerificationKey {
    PublicParams pp;
    std::uint32_t n = 0;
    std::vector<std::uint32_t> public_positions;
    std::array<MatrixCommitment, 3> matrices;
    Digest digest{};
};

struct Keys {
    PublicParams pp;
    ProvingKey pk;
    VerificationKey vk;
};

struct SetupOptions {
    /// Lower bound on |H|; zero means "whatever the padding rule gives".
    std::uint32_t min_h_order = 0;
};

/// Throws TooLarge past kMaxConstraints, DomainUnavailable if F_p lacks a
/// subgroup of the padded size.
Keys setup(std::uint32_t lambda, const r1cs::Instance& inst, SetupOptions options = {});

MatrixEncoding encode_matrix(const r1cs::SparseMatrix& m, const PublicParams& pp);
VerificationKey commit_matrices(const ProvingKey& pk);
Digest vk_digest(const VerificationKey& vk);

enum class ClaimKind : std::uint8_t { SLT = 1, DIAG = 2 };

struct EntryOpening {
    Opening row;
    Opening col;
    Opening val;
};

/// Openings of Row, Col and Val at every j in [1, m_hat] for one matrix.
struct StructureProof {
    ClaimKind kind = ClaimKind::SLT;
    Digest vk_digest{};
    std::vector<EntryOpening> openings;
};

struct StructureProofs {
    StructureProof a;
    StructureProof b;
    StructureProof c;
};

/// Commitment to z over H and the openings row-by-row checking needs.
struct ExecutionProof {
    Digest vk_digest{};
    Commitment z_commitment;
    std::vector<Fp> publics;
    std::vector<Opening> z_openings;
};

struct ProofBundle {
    StructureProofs structure;
    ExecutionProof execution;
};

StructureProofs prove_structure(const ProvingKey& pk);

/// Rejection reasons read "<matrix> j=<j> <condition>", e.g. "A j=1 SLT".
Verdict verify_structure(const VerificationKey& vk, const StructureProof& pa, const StructureProof& pb,
                         const StructureProof& pc);

/// Throws RefuseToProve unless z satisfies the instance.
ExecutionProof prove_execution(const ProvingKey& pk, const r1cs::Assignment& z);

/// Column indices an execution proof must open: constant wire, every column
/// touched by a constraint row, and the public positions.
std::vector<std::uint32_t> required_openings(const r1cs::Instance& inst);

/// Matrix entries are taken from the structure proofs' openings (re-verified
/// here), so this check stands on its own.
Verdict verify_execution(const VerificationKey& vk, const Digest& inst_digest, const StructureProofs& structure,
                         const ExecutionProof& proof, std::span<const Fp> publics);

ProofBundle prove(const ProvingKey& pk, const r1cs::Assignment& z);
Verdict verify(const VerificationKey& vk, const ProofBundle& bundle, std::span<const Fp> publics);

void write_params(ByteWriter& out, const PublicParams& pp);
PublicParams read_params(ByteReader& in);
Bytes encode_proving_key(const ProvingKey& pk);
ProvingKey decode_proving_key(std::span<const std::uint8_t> bytes);
Bytes encode_verification_key(const VerificationKey& vk);
VerificationKey decode_verification_key(std::span<const std::uint8_t> bytes);

Bytes encode_structure_proof(const StructureProof& proof);
StructureProof decode_structure_proof(std::span<const std::uint8_t> bytes, std::uint64_t modulus);
Bytes encode_execution_proof(const ExecutionProof& proof);
ExecutionProof decode_execution_proof(std::span<const std::uint8_t> bytes, std::uint64_t modulus);
Bytes encode_bundle(const ProofBundle& bundle);
/// Throws EncodingError on any malformed or trailing input.
ProofBundle decode_bundle(std::span<const std::uint8_t> bytes, std::uint64_t modulus);

/// Decode-then-verify; any decoding failure is a rejection.
Verdict verify_bundle_bytes(const VerificationKey& vk, std::span<const std::uint8_t> bytes,
                            std::span<const Fp> publics);

} // namespace devproof::fc
