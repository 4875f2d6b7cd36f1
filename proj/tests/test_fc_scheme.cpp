#include "doctest.h"

#include <random>

#include "corpus.hpp"
#include "devproof/error.hpp"
#include "devproof/fc_scheme.hpp"

using namespace devproof;
using namespace devproof::fc;
using r1cs::Entry;
using r1cs::Instance;
using r1cs::SparseMatrix;

namespace {

constexpr std::uint64_t P = field::kTestPrime;

Fp f17(std::uint64_t v) { return {v, P}; }

SparseMatrix mat(std::uint32_t n, std::initializer_list<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> list) {
    std::vector<Entry> out;
    for (auto [r, c, v] : list) out.push_back({r, c, f17(v)});
    return SparseMatrix(n, P, out);
}

Instance square_instance() { return r1cs::build_program(r1cs::parse_program(corpus::kSquare), P); }

r1cs::Assignment z17(std::initializer_list<std::uint64_t> values) {
    r1cs::Assignment z;
    for (auto v : values) z.z.push_back(f17(v));
    return z;
}

std::vector<Fp> pub17(std::initializer_list<std::uint64_t> values) {
    std::vector<Fp> out;
    for (auto v : values) out.push_back(f17(v));
    return out;
}

bool constant_poly(const Polynomial& poly, std::uint64_t v) {
    return poly == Polynomial::constant(f17(v));
}

} // namespace

TEST_CASE("setup: padding rule") {
    const auto keys = setup(128, square_instance());
    CHECK(keys.pp.n_hat() == 4);
    CHECK(keys.pp.m_hat() == 1);
    CHECK(keys.pp.omega() == f17(4));
    CHECK(keys.pp.gamma() == f17(1));
    CHECK(keys.pp.lambda == 128);
    CHECK(keys.vk.digest == keys.pk.vk_digest);

    Instance three{4, P, {2}, mat(4, {{2, 1, 1}, {3, 1, 1}, {4, 1, 1}}), mat(4, {}), mat(4, {})};
    CHECK(setup(128, three).pp.m_hat() == 4);

    // lambda only lands in pp
    const auto other = setup(80, square_instance());
    CHECK(other.pp.lambda == 80);
    CHECK(other.vk.matrices == keys.vk.matrices);
}

TEST_CASE("setup: size and domain errors") {
    Instance big{fc::kMaxConstraints + 1, field::kRuntimePrime, {}, {}, {}, {}};
    big.a = SparseMatrix(big.n, big.modulus);
    big.b = big.a;
    big.c = big.a;
    try {
        setup(128, big);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooLarge);
    }

    Instance wide{17, P, {}, SparseMatrix(17, P), SparseMatrix(17, P), SparseMatrix(17, P)};
    try {
        setup(128, wide); // needs |H| = 32, which does not divide 16
        FAIL("expected DomainUnavailable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DomainUnavailable);
    }
}

TEST_CASE("encode_matrix with omega = 2") {
    const auto keys = setup(128, square_instance(), {.min_h_order = 8});
    REQUIRE(keys.pp.omega() == f17(2));
    const auto a = encode_matrix(mat(3, {{3, 2, 1}}), keys.pp);
    CHECK(constant_poly(a.row, 8));
    CHECK(constant_poly(a.col, 4));
    CHECK(constant_poly(a.val, 1));

    const auto empty = encode_matrix(mat(3, {}), keys.pp);
    CHECK(constant_poly(empty.row, 1)); // omega^{n_hat}
    CHECK(constant_poly(empty.col, 2));
    CHECK(empty.val.is_zero());

    const auto c = encode_matrix(mat(3, {{3, 3, 1}}), keys.pp);
    CHECK(constant_poly(c.row, 8));
    CHECK(constant_poly(c.col, 8));
}

TEST_CASE("encodings interpolate the padded entry list on K") {
    const auto inst = r1cs::build_program(r1cs::parse_program(corpus::kMixed), P);
    const auto keys = setup(128, inst);
    for (std::size_t m = 0; m < 3; ++m) {
        const auto& enc = keys.pk.encodings[m];
        REQUIRE(enc.padded.size() == keys.pp.m_hat());
        for (std::uint32_t j = 1; j <= keys.pp.m_hat(); ++j) {
            const auto& e = enc.padded[j - 1];
            const auto x = keys.pp.k.element(j);
            CHECK(enc.row.evaluate(x) == keys.pp.omega().pow(e.row));
            CHECK(enc.col.evaluate(x) == keys.pp.omega().pow(e.col));
            CHECK(enc.val.evaluate(x) == e.value);
            CHECK(enc.row_evals[j - 1] == enc.row.evaluate(x));
        }
    }
}

TEST_CASE("commit_matrices") {
    const auto keys = setup(128, square_instance());
    for (const auto& m : keys.vk.matrices) {
        CHECK(m.row.domain_order == 1);
        CHECK(m.col.domain_order == 1);
        CHECK(m.val.domain_order == 1);
    }
    for (std::size_t m = 0; m < 3; ++m) {
        CHECK(keys.vk.matrices[m].row == commit::commit(keys.pk.encodings[m].row, keys.pp.k));
        CHECK(keys.vk.matrices[m].col == commit::commit(keys.pk.encodings[m].col, keys.pp.k));
        CHECK(keys.vk.matrices[m].val == commit::commit(keys.pk.encodings[m].val, keys.pp.k));
    }
    CHECK(commit_matrices(keys.pk).digest == keys.vk.digest);

    auto changed = square_instance();
    changed.a = mat(3, {{3, 2, 2}});
    CHECK(setup(128, changed).vk.digest != keys.vk.digest);
}

TEST_CASE("prove_structure openings") {
    const auto wide = setup(128, square_instance(), {.min_h_order = 8});
    const auto proofs = prove_structure(wide.pk);
    REQUIRE(proofs.a.openings.size() == 1);
    CHECK(proofs.a.openings[0].row.value == f17(8));
    CHECK(proofs.a.openings[0].col.value == f17(4));
    CHECK(proofs.c.openings[0].row.value == f17(8));
    CHECK(proofs.c.openings[0].col.value == f17(8));
    CHECK(proofs.a.kind == ClaimKind::SLT);
    CHECK(proofs.b.kind == ClaimKind::SLT);
    CHECK(proofs.c.kind == ClaimKind::DIAG);

    // with the padding rule's own |H| = 4, omega = 4
    const auto tight = setup(128, square_instance());
    const auto tp = prove_structure(tight.pk);
    CHECK(tp.a.openings[0].row.value == f17(13)); // 4^3
    CHECK(tp.a.openings[0].col.value == f17(16)); // 4^2

    Instance empty_a = square_instance();
    empty_a.a = mat(3, {});
    const auto ek = setup(128, empty_a);
    const auto ep = prove_structure(ek.pk);
    CHECK(ep.a.openings[0].row.value == f17(1));
    CHECK(ep.a.openings[0].col.value == ek.pp.omega());
}

TEST_CASE("verify_structure accepts honest proofs and names the first failure") {
    const auto keys = setup(128, square_instance());
    const auto proofs = prove_structure(keys.pk);
    CHECK(verify_structure(keys.vk, proofs.a, proofs.b, proofs.c).accepted);

    auto upper = square_instance();
    upper.a = mat(3, {{2, 3, 1}});
    const auto uk = setup(128, upper);
    const auto up = prove_structure(uk.pk);
    const auto uv = verify_structure(uk.vk, up.a, up.b, up.c);
    CHECK_FALSE(uv.accepted);
    CHECK(uv.reason == "A j=1 SLT");

    auto offdiag = square_instance();
    offdiag.c = mat(3, {{3, 2, 1}});
    const auto ck = setup(128, offdiag);
    const auto cp = prove_structure(ck.pk);
    const auto cv = verify_structure(ck.vk, cp.a, cp.b, cp.c);
    CHECK_FALSE(cv.accepted);
    CHECK(cv.reason == "C j=1 DIAG");

    // swapped roles and foreign keys
    CHECK_FALSE(verify_structure(keys.vk, proofs.a, proofs.c, proofs.c).accepted);
    CHECK_FALSE(verify_structure(uk.vk, proofs.a, proofs.b, proofs.c).accepted);
}

TEST_CASE("prove_execution openings") {
    const auto keys = setup(128, square_instance());
    const auto proof = prove_execution(keys.pk, z17({1, 3, 9}));
    std::vector<std::uint32_t> idx;
    for (const auto& op : proof.z_openings) idx.push_back(op.index);
    CHECK(idx == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(proof.publics == pub17({3, 9}));

    // z over H is committed as the interpolant's evaluations
    const auto zpoly = field::interpolate(keys.pp.h, pub17({1, 3, 9, 0}));
    CHECK(commit::commit(zpoly, keys.pp.h) == proof.z_commitment);

    const auto empty = r1cs::build_program(r1cs::parse_program("inputs 1\n"), P);
    const auto ek = setup(128, empty);
    const auto ep = prove_execution(ek.pk, z17({1, 5}));
    CHECK(ep.z_openings.size() == 2); // constant wire and the single public column

    try {
        prove_execution(keys.pk, z17({1, 3, 10}));
        FAIL("expected RefuseToProve");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RefuseToProve);
    }
}

TEST_CASE("verify_execution examples") {
    const auto keys = setup(128, square_instance());
    const auto bundle = prove(keys.pk, z17({1, 3, 9}));
    const auto& s = bundle.structure;
    CHECK(verify_execution(keys.vk, keys.vk.digest, s, bundle.execution, pub17({3, 9})).accepted);

    const auto wrong_y = verify_execution(keys.vk, keys.vk.digest, s, bundle.execution, pub17({3, 10}));
    CHECK_FALSE(wrong_y.accepted);
    CHECK(wrong_y.reason == "public-mismatch");

    auto tampered = bundle.execution;
    tampered.z_openings[2].value = f17(10);
    const auto tv = verify_execution(keys.vk, keys.vk.digest, s, tampered, pub17({3, 9}));
    CHECK_FALSE(tv.accepted);
    CHECK(tv.reason.rfind("opening", 0) == 0);

    CHECK_FALSE(verify_execution(keys.vk, Digest{}, s, bundle.execution, pub17({3, 9})).accepted);

    auto missing = bundle.execution;
    missing.z_openings.pop_back();
    CHECK(verify_execution(keys.vk, keys.vk.digest, s, missing, pub17({3, 9})).reason == "opening-set");
}

TEST_CASE("a cheating prover with a consistent but wrong z is caught by the row check") {
    const auto keys = setup(128, square_instance());
    const auto honest = prove(keys.pk, z17({1, 3, 9}));
    // commit to z = (1, 3, 10) without going through prove_execution
    const std::vector<Fp> evals = pub17({1, 3, 10, 0});
    const commit::MerkleTree tree(evals);
    ExecutionProof forged;
    forged.vk_digest = keys.vk.digest;
    forged.z_commitment = {tree.root(), 4};
    forged.publics = pub17({3, 10});
    for (std::uint32_t k : {1, 2, 3}) forged.z_openings.push_back(tree.open(k));
    const auto v = verify_execution(keys.vk, keys.vk.digest, honest.structure, forged, pub17({3, 10}));
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == "row 3");

    // and the constant wire must be one
    const std::vector<Fp> zero_const = pub17({0, 3, 0, 0});
    const commit::MerkleTree t2(zero_const);
    forged.z_commitment = {t2.root(), 4};
    forged.publics = pub17({3, 0});
    forged.z_openings.clear();
    for (std::uint32_t k : {1, 2, 3}) forged.z_openings.push_back(t2.open(k));
    CHECK(verify_execution(keys.vk, keys.vk.digest, honest.structure, forged, pub17({3, 0})).reason ==
          "constant-wire");
}

TEST_CASE("completeness across the corpus in both fields") {
    std::mt19937_64 rng(21);
    for (std::uint64_t p : {P, field::kRuntimePrime}) {
        for (const auto& [name, prog] : corpus::all()) {
            CAPTURE(name);
            const auto inst = r1cs::build_program(prog, p);
            const auto keys = setup(128, inst);
            for (int trial = 0; trial < 4; ++trial) {
                std::vector<Fp> in;
                for (std::uint32_t i = 0; i < prog.num_inputs; ++i) in.emplace_back(rng() % p, p);
                const auto z = r1cs::make_assignment(prog, in);
                const auto bundle = prove(keys.pk, z);
                std::vector<Fp> publics;
                for (auto pos : inst.public_positions) publics.push_back(z.at(pos));
                CHECK(verify(keys.vk, bundle, publics).accepted);
            }
        }
    }
}

TEST_CASE("structural soundness: every single-entry 4x4 matrix") {
    // the verifier must accept exactly when the brute-force predicates do
    for (std::size_t which = 0; which < 3; ++which) {
        for (std::uint32_t r = 1; r <= 4; ++r)
            for (std::uint32_t c = 1; c <= 4; ++c)
                for (std::uint64_t v = 1; v < P; v += 5) {
                    Instance inst{4, P, {2}, mat(4, {}), mat(4, {}), mat(4, {})};
                    SparseMatrix& target = which == 0 ? inst.a : which == 1 ? inst.b : inst.c;
                    target = mat(4, {{r, c, v}});
                    const bool oracle = r1cs::is_strictly_lower_triangular(inst.a) &&
                                        r1cs::is_strictly_lower_triangular(inst.b) && r1cs::is_diagonal(inst.c);
                    const auto keys = setup(128, inst);
                    const auto proofs = prove_structure(keys.pk);
                    CHECK(verify_structure(keys.vk, proofs.a, proofs.b, proofs.c).accepted == oracle);
                }
    }
}

TEST_CASE("key and proof encodings round-trip") {
    const auto inst = r1cs::build_program(r1cs::parse_program(corpus::kMixed), field::kRuntimePrime);
    const auto keys = setup(128, inst);
    const auto pk2 = decode_proving_key(encode_proving_key(keys.pk));
    CHECK(pk2.vk_digest == keys.pk.vk_digest);
    CHECK(pk2.instance == keys.pk.instance);
    const auto vk2 = decode_verification_key(encode_verification_key(keys.vk));
    CHECK(vk2.digest == keys.vk.digest);
    CHECK(encode_verification_key(vk2) == encode_verification_key(keys.vk));

    const std::vector<Fp> in{Fp(2, inst.modulus), Fp(3, inst.modulus), Fp(4, inst.modulus)};
    const auto z = r1cs::make_assignment(r1cs::parse_program(corpus::kMixed), in);
    const auto bytes = encode_bundle(prove(pk2, z));
    std::vector<Fp> publics;
    for (auto pos : inst.public_positions) publics.push_back(z.at(pos));
    CHECK(verify_bundle_bytes(vk2, bytes, publics).accepted);
    CHECK(encode_bundle(decode_bundle(bytes, inst.modulus)) == bytes);

    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_FALSE(verify_bundle_bytes(vk2, trailing, publics).accepted);
    auto bad_vk = encode_verification_key(keys.vk);
    bad_vk[40] ^= 1;
    CHECK_THROWS_AS(decode_verification_key(bad_vk), Error);
}
