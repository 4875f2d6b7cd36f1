#include "devproof/fc_scheme.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <variant>

#include "devproof/hash.hpp"

namespace devproof::fc {

namespace {

constexpr std::array<const char*, 3> kMatrixNames{"A", "B", "C"};
constexpr std::uint8_t kExecutionTag = 0x03;
constexpr std::uint8_t kBundleTag = 0x10;
constexpr std::uint8_t kProvingKeyTag = 'P';
constexpr std::uint8_t kVerificationKeyTag = 'V';

ClaimKind expected_kind(std::size_t which) { return which == 2 ? ClaimKind::DIAG : ClaimKind::SLT; }

const StructureProof& proof_of(const StructureProofs& s, std::size_t which) {
    return which == 0 ? s.a : which == 1 ? s.b : s.c;
}

std::string where(std::size_t which, std::size_t j, const std::string& condition) {
    return std::string(kMatrixNames[which]) + " j=" + std::to_string(j) + " " + condition;
}

struct DecodedEntry {
    std::size_t j;
    std::uint64_t row;
    std::uint64_t col;
    Fp value;
};

struct DecodeFailure {
    std::size_t matrix;
    std::size_t j;
    std::string condition;
};

// Checks every opening of one matrix against the vk and recovers its entries.
// Zero-valued (padding) entries are dropped.
std::variant<std::vector<DecodedEntry>, DecodeFailure> decode_matrix(const VerificationKey& vk,
                                                                     const field::DlogTable& dlog,
                                                                     const StructureProof& proof,
                                                                     std::size_t which) {
    const auto& com = vk.matrices[which];
    if (proof.kind != expected_kind(which)) return DecodeFailure{which, 0, "claim-kind"};
    if (proof.vk_digest != vk.digest) return DecodeFailure{which, 0, "vk-digest"};
    if (proof.openings.size() != vk.pp.m_hat()) return DecodeFailure{which, 0, "opening-count"};

    std::vector<DecodedEntry> out;
    for (std::size_t j = 1; j <= proof.openings.size(); ++j) {
        const auto& eo = proof.openings[j - 1];
        if (eo.row.index != j || eo.col.index != j || eo.val.index != j) return DecodeFailure{which, j, "index"};
        if (!commit::verify_opening(com.row, eo.row) || !commit::verify_opening(com.col, eo.col) ||
            !commit::verify_opening(com.val, eo.val))
            return DecodeFailure{which, j, "opening"};
        if (eo.val.value.is_zero()) continue;
        if (!dlog.contains(eo.row.value) || !dlog.contains(eo.col.value)) return DecodeFailure{which, j, "encoding"};
        out.push_back({j, dlog.log(eo.row.value), dlog.log(eo.col.value), eo.val.value});
    }
    return out;
}

Bytes commitment_bytes(const VerificationKey& vk) {
    ByteWriter w;
    write_params(w, vk.pp);
    w.u32(vk.n);
    w.u32(static_cast<std::uint32_t>(vk.public_positions.size()));
    for (auto pos : vk.public_positions) w.u32(pos);
    for (const auto& m : vk.matrices) {
        commit::write_commitment(w, m.row);
        commit::write_commitment(w, m.col);
        commit::write_commitment(w, m.val);
    }
    return std::move(w).take();
}

ProvingKey make_proving_key(PublicParams pp, const r1cs::Instance& inst) {
    ProvingKey pk;
    pk.pp = std::move(pp);
    pk.instance = inst;
    for (std::size_t m = 0; m < 3; ++m) pk.encodings[m] = encode_matrix(inst.matrix(m), pk.pp);
    pk.vk_digest = commit_matrices(pk).digest;
    return pk;
}

void write_structure(ByteWriter& w, const StructureProof& proof) {
    w.u8(static_cast<std::uint8_t>(proof.kind));
    w.digest(proof.vk_digest);
    w.u32(static_cast<std::uint32_t>(proof.openings.size()));
    for (const auto& eo : proof.openings) {
        commit::write_opening(w, eo.row);
        commit::write_opening(w, eo.col);
        commit::write_opening(w, eo.val);
    }
}

} // namespace

Keys setup(std::uint32_t lambda, const r1cs::Instance& inst, SetupOptions options) {
    if (inst.n > kMaxConstraints)
        throw Error(ErrorKind::TooLarge, "instance has " + std::to_string(inst.n) + " wires; cap is " +
                                             std::to_string(kMaxConstraints));
    const auto n_hat = commit::next_pow2(std::max<std::uint64_t>({inst.n, 2, options.min_h_order}));
    const auto m_hat = commit::next_pow2(std::max<std::uint64_t>(inst.nnz_max(), 1));

    PublicParams pp;
    pp.modulus = inst.modulus;
    pp.lambda = lambda;
    pp.h = SubgroupDomain::of_order(inst.modulus, n_hat);
    pp.k = SubgroupDomain::of_order(inst.modulus, m_hat);

    Keys keys;
    keys.pp = pp;
    keys.pk = make_proving_key(pp, inst);
    keys.vk = commit_matrices(keys.pk);
    return keys;
}

MatrixEncoding encode_matrix(const r1cs::SparseMatrix& m, const PublicParams& pp) {
    const auto m_hat = pp.m_hat();
    if (m.size() > m_hat) throw Error(ErrorKind::TooLarge, "matrix has more entries than |K|");
    if (m.dim() > pp.n_hat()) throw Error(ErrorKind::TooLarge, "matrix dimension exceeds |H|");
    const auto p = pp.modulus;

    MatrixEncoding enc;
    enc.padded = m.entries();
    while (enc.padded.size() < m_hat) enc.padded.push_back({pp.n_hat(), 1, Fp::zero(p)});
    for (const auto& e : enc.padded) {
        enc.row_evals.push_back(pp.omega().pow(e.row));
        enc.col_evals.push_back(pp.omega().pow(e.col));
        enc.val_evals.push_back(e.value);
    }
    enc.row = field::interpolate(pp.k, enc.row_evals);
    enc.col = field::interpolate(pp.k, enc.col_evals);
    enc.val = field::interpolate(pp.k, enc.val_evals);
    return enc;
}

Digest vk_digest(const VerificationKey& vk) { return sha256(commitment_bytes(vk)); }

VerificationKey commit_matrices(const ProvingKey& pk) {
    VerificationKey vk;
    vk.pp = pk.pp;
    vk.n = pk.instance.n;
    vk.public_positions = pk.instance.public_positions;
    for (std::size_t m = 0; m < 3; ++m) {
        const auto& enc = pk.encodings[m];
        // leaves are the evaluations on K, which the encoding already holds
        vk.matrices[m] = {commit::Commitment{commit::MerkleTree(enc.row_evals).root(), pk.pp.m_hat()},
                          commit::Commitment{commit::MerkleTree(enc.col_evals).root(), pk.pp.m_hat()},
                          commit::Commitment{commit::MerkleTree(enc.val_evals).root(), pk.pp.m_hat()}};
    }
    vk.digest = vk_digest(vk);
    return vk;
}

StructureProofs prove_structure(const ProvingKey& pk) {
    std::array<StructureProof, 3> out;
    for (std::size_t m = 0; m < 3; ++m) {
        const auto& enc = pk.encodings[m];
        const commit::MerkleTree row(enc.row_evals), col(enc.col_evals), val(enc.val_evals);
        out[m].kind = expected_kind(m);
        out[m].vk_digest = pk.vk_digest;
        for (std::uint32_t j = 1; j <= pk.pp.m_hat(); ++j) out[m].openings.push_back({row.open(j), col.open(j), val.open(j)});
    }
    return {std::move(out[0]), std::move(out[1]), std::move(out[2])};
}

Verdict verify_structure(const VerificationKey& vk, const StructureProof& pa, const StructureProof& pb,
                         const StructureProof& pc) {
    const field::DlogTable dlog(vk.pp.omega(), vk.pp.n_hat());
    const std::array<const StructureProof*, 3> proofs{&pa, &pb, &pc};
    for (std::size_t m = 0; m < 3; ++m) {
        auto decoded = decode_matrix(vk, dlog, *proofs[m], m);
        if (auto* fail = std::get_if<DecodeFailure>(&decoded))
            return Verdict::reject(where(fail->matrix, fail->j, fail->condition));
        for (const auto& e : std::get<0>(decoded)) {
            if (expected_kind(m) == ClaimKind::SLT && !(e.row > e.col)) return Verdict::reject(where(m, e.j, "SLT"));
            if (expected_kind(m) == ClaimKind::DIAG && e.row != e.col) return Verdict::reject(where(m, e.j, "DIAG"));
        }
    }
    return Verdict::accept();
}

std::vector<std::uint32_t> required_openings(const r1cs::Instance& inst) {
    std::set<std::uint32_t> idx{1};
    for (std::size_t m = 0; m < 3; ++m)
        for (const auto& e : inst.matrix(m).entries()) idx.insert(e.col);
    idx.insert(inst.public_positions.begin(), inst.public_positions.end());
    return {idx.begin(), idx.end()};
}

ExecutionProof prove_execution(const ProvingKey& pk, const r1cs::Assignment& z) {
    const auto& inst = pk.instance;
    if (z.size() != inst.n || !r1cs::is_satisfied(inst, z))
        throw Error(ErrorKind::RefuseToProve, "assignment does not satisfy the instance");

    // evaluations of the interpolant of z over H: z_k at omega^k, zero past n
    std::vector<Fp> evals(pk.pp.n_hat(), Fp::zero(pk.pp.modulus));
    std::copy(z.z.begin(), z.z.end(), evals.begin());
    const commit::MerkleTree tree(evals);

    ExecutionProof proof;
    proof.vk_digest = pk.vk_digest;
    proof.z_commitment = {tree.root(), pk.pp.n_hat()};
    for (auto pos : inst.public_positions) proof.publics.push_back(z.at(pos));
    for (auto k : required_openings(inst)) proof.z_openings.push_back(tree.open(k));
    return proof;
}

Verdict verify_execution(const VerificationKey& vk, const Digest& inst_digest, const StructureProofs& structure,
                         const ExecutionProof& proof, std::span<const Fp> publics) {
    if (inst_digest != vk.digest || proof.vk_digest != vk.digest) return Verdict::reject("vk-digest");
    if (proof.z_commitment.domain_order != vk.pp.n_hat()) return Verdict::reject("z-domain");

    const field::DlogTable dlog(vk.pp.omega(), vk.pp.n_hat());
    std::array<std::vector<DecodedEntry>, 3> matrices;
    for (std::size_t m = 0; m < 3; ++m) {
        auto decoded = decode_matrix(vk, dlog, proof_of(structure, m), m);
        if (auto* fail = std::get_if<DecodeFailure>(&decoded))
            return Verdict::reject("matrix-opening " + where(fail->matrix, fail->j, fail->condition));
        matrices[m] = std::move(std::get<0>(decoded));
    }

    std::set<std::uint32_t> required{1};
    for (const auto& entries : matrices)
        for (const auto& e : entries) required.insert(static_cast<std::uint32_t>(e.col));
    required.insert(vk.public_positions.begin(), vk.public_positions.end());

    if (proof.z_openings.size() != required.size()) return Verdict::reject("opening-set");
    std::map<std::uint64_t, Fp> opened;
    auto want = required.begin();
    for (const auto& op : proof.z_openings) {
        if (op.index != *want++) return Verdict::reject("opening-set");
        if (!commit::verify_opening(proof.z_commitment, op))
            return Verdict::reject("opening at " + std::to_string(op.index));
        opened.emplace(op.index, op.value);
    }
    if (opened.at(1) != Fp::one(vk.pp.modulus)) return Verdict::reject("constant-wire");

    if (proof.publics.size() != vk.public_positions.size() || publics.size() != vk.public_positions.size())
        return Verdict::reject("public-mismatch");
    for (std::size_t i = 0; i < publics.size(); ++i) {
        if (proof.publics[i] != publics[i] || opened.at(vk.public_positions[i]) != publics[i])
            return Verdict::reject("public-mismatch");
    }

    std::map<std::uint64_t, std::array<Fp, 3>> rows;
    const Fp zero = Fp::zero(vk.pp.modulus);
    for (std::size_t m = 0; m < 3; ++m) {
        for (const auto& e : matrices[m]) {
            auto [it, _] = rows.try_emplace(e.row, std::array<Fp, 3>{zero, zero, zero});
            it->second[m] += e.value * opened.at(e.col);
        }
    }
    for (const auto& [row, sums] : rows)
        if (sums[0] * sums[1] != sums[2]) return Verdict::reject("row " + std::to_string(row));
    return Verdict::accept();
}

ProofBundle prove(const ProvingKey& pk, const r1cs::Assignment& z) {
    // execution first: it refuses unsatisfying assignments before any work is wasted
    ExecutionProof exec = prove_execution(pk, z);
    return {prove_structure(pk), std::move(exec)};
}

Verdict verify(const VerificationKey& vk, const ProofBundle& bundle, std::span<const Fp> publics) {
    const auto& s = bundle.structure;
    if (auto v = verify_structure(vk, s.a, s.b, s.c); !v) return Verdict::reject("structure: " + v.reason);
    if (auto v = verify_execution(vk, vk.digest, s, bundle.execution, publics); !v)
        return Verdict::reject("execution: " + v.reason);
    return Verdict::accept();
}

void write_params(ByteWriter& out, const PublicParams& pp) {
    out.u64(pp.modulus);
    out.u32(pp.lambda);
    out.u32(pp.n_hat());
    field::write_element(out, pp.omega());
    out.u32(pp.m_hat());
    field::write_element(out, pp.gamma());
}

PublicParams read_params(ByteReader& in) {
    PublicParams pp;
    pp.modulus = in.u64();
    if (pp.modulus < 3) throw Error(ErrorKind::EncodingError, "bad modulus");
    pp.lambda = in.u32();
    const auto n_hat = in.u32();
    const auto omega = field::read_element(in, pp.modulus);
    const auto m_hat = in.u32();
    const auto gamma = field::read_element(in, pp.modulus);
    if (n_hat == 0 || m_hat == 0 || n_hat > kMaxConstraints || m_hat > field::kMaxDlogOrder ||
        !field::has_order(omega, n_hat) || !field::has_order(gamma, m_hat))
        throw Error(ErrorKind::EncodingError, "public parameters carry an invalid domain");
    pp.h = SubgroupDomain(omega, n_hat);
    pp.k = SubgroupDomain(gamma, m_hat);
    return pp;
}

Bytes encode_proving_key(const ProvingKey& pk) {
    ByteWriter w;
    w.u8(kProvingKeyTag);
    write_params(w, pk.pp);
    r1cs::write_instance(w, pk.instance);
    return std::move(w).take();
}

ProvingKey decode_proving_key(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.u8() != kProvingKeyTag) throw Error(ErrorKind::EncodingError, "not a proving key");
    auto pp = read_params(r);
    auto inst = r1cs::read_instance(r);
    r.expect_done();
    if (inst.modulus != pp.modulus || inst.n > pp.n_hat() || inst.nnz_max() > pp.m_hat())
        throw Error(ErrorKind::EncodingError, "proving key does not match its parameters");
    return make_proving_key(std::move(pp), inst);
}

Bytes encode_verification_key(const VerificationKey& vk) {
    ByteWriter w;
    w.u8(kVerificationKeyTag);
    w.raw(commitment_bytes(vk));
    w.digest(vk.digest);
    return std::move(w).take();
}

VerificationKey decode_verification_key(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.u8() != kVerificationKeyTag) throw Error(ErrorKind::EncodingError, "not a verification key");
    VerificationKey vk;
    vk.pp = read_params(r);
    vk.n = r.u32();
    const auto npub = r.u32();
    for (std::uint32_t i = 0; i < npub; ++i) vk.public_positions.push_back(r.u32());
    for (auto& m : vk.matrices) {
        m.row = commit::read_commitment(r);
        m.col = commit::read_commitment(r);
        m.val = commit::read_commitment(r);
    }
    vk.digest = r.digest();
    r.expect_done();
    if (vk.digest != vk_digest(vk)) throw Error(ErrorKind::EncodingError, "verification key digest mismatch");
    return vk;
}

Bytes encode_structure_proof(const StructureProof& proof) {
    ByteWriter w;
    write_structure(w, proof);
    return std::move(w).take();
}

StructureProof decode_structure_proof(std::span<const std::uint8_t> bytes, std::uint64_t modulus) {
    ByteReader r(bytes);
    StructureProof proof;
    const auto kind = r.u8();
    if (kind != static_cast<std::uint8_t>(ClaimKind::SLT) && kind != static_cast<std::uint8_t>(ClaimKind::DIAG))
        throw Error(ErrorKind::EncodingError, "unknown claim kind");
    proof.kind = static_cast<ClaimKind>(kind);
    proof.vk_digest = r.digest();
    const auto count = r.u32();
    if (count > field::kMaxDlogOrder) throw Error(ErrorKind::EncodingError, "opening count too large");
    for (std::uint32_t j = 0; j < count; ++j) {
        EntryOpening eo;
        eo.row = commit::read_opening(r, modulus);
        eo.col = commit::read_opening(r, modulus);
        eo.val = commit::read_opening(r, modulus);
        proof.openings.push_back(std::move(eo));
    }
    r.expect_done();
    return proof;
}

Bytes encode_execution_proof(const ExecutionProof& proof) {
    ByteWriter w;
    w.u8(kExecutionTag);
    w.digest(proof.vk_digest);
    commit::write_commitment(w, proof.z_commitment);
    w.u32(static_cast<std::uint32_t>(proof.publics.size()));
    for (const auto& x : proof.publics) field::write_element(w, x);
    w.u32(static_cast<std::uint32_t>(proof.z_openings.size()));
    for (const auto& op : proof.z_openings) commit::write_opening(w, op);
    return std::move(w).take();
}

ExecutionProof decode_execution_proof(std::span<const std::uint8_t> bytes, std::uint64_t modulus) {
    ByteReader r(bytes);
    if (r.u8() != kExecutionTag) throw Error(ErrorKind::EncodingError, "not an execution proof");
    ExecutionProof proof;
    proof.vk_digest = r.digest();
    proof.z_commitment = commit::read_commitment(r);
    const auto npub = r.u32();
    if (npub > kMaxConstraints) throw Error(ErrorKind::EncodingError, "public count too large");
    for (std::uint32_t i = 0; i < npub; ++i) proof.publics.push_back(field::read_element(r, modulus));
    const auto nopen = r.u32();
    if (nopen > kMaxConstraints) throw Error(ErrorKind::EncodingError, "opening count too large");
    for (std::uint32_t i = 0; i < nopen; ++i) proof.z_openings.push_back(commit::read_opening(r, modulus));
    r.expect_done();
    return proof;
}

Bytes encode_bundle(const ProofBundle& bundle) {
    ByteWriter w;
    w.u8(kBundleTag);
    w.blob(encode_structure_proof(bundle.structure.a));
    w.blob(encode_structure_proof(bundle.structure.b));
    w.blob(encode_structure_proof(bundle.structure.c));
    w.blob(encode_execution_proof(bundle.execution));
    return std::move(w).take();
}

ProofBundle decode_bundle(std::span<const std::uint8_t> bytes, std::uint64_t modulus) {
    ByteReader r(bytes);
    if (r.u8() != kBundleTag) throw Error(ErrorKind::EncodingError, "not a proof bundle");
    ProofBundle bundle;
    bundle.structure.a = decode_structure_proof(r.blob(), modulus);
    bundle.structure.b = decode_structure_proof(r.blob(), modulus);
    bundle.structure.c = decode_structure_proof(r.blob(), modulus);
    bundle.execution = decode_execution_proof(r.blob(), modulus);
    r.expect_done();
    return bundle;
}

Verdict verify_bundle_bytes(const VerificationKey& vk, std::span<const std::uint8_t> bytes,
                            std::span<const Fp> publics) {
    ProofBundle bundle;
    try {
        bundle = decode_bundle(bytes, vk.pp.modulus);
    } catch (const Error& e) {
        return Verdict::reject(std::string("malformed: ") + e.what());
    }
    return verify(vk, bundle, publics);
}

} // namespace devproof::fc
