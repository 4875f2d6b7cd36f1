#include "doctest.h"

#include <random>
#include <vector>

#include "devproof/error.hpp"
#include "devproof/field.hpp"

using namespace devproof;
using namespace devproof::field;

namespace {

constexpr std::uint64_t P = kTestPrime;

Fp f17(std::uint64_t v) { return {v, P}; }

// order by repeated multiplication, independent of has_order()
std::uint64_t naive_order(std::uint64_t g, std::uint64_t p) {
    std::uint64_t acc = g % p;
    for (std::uint64_t k = 1; k < p; ++k) {
        if (acc == 1) return k;
        acc = acc * g % p;
    }
    return 0;
}

std::vector<Fp> random_coeffs(std::mt19937_64& rng, std::size_t count, std::uint64_t p) {
    std::vector<Fp> out;
    for (std::size_t i = 0; i < count; ++i) out.emplace_back(rng() % p, p);
    return out;
}

} // namespace

TEST_CASE("subgroup_generator picks the smallest generator of the requested order") {
    CHECK(subgroup_generator(P, 4) == f17(4));
    CHECK(subgroup_generator(P, 8) == f17(2));
    CHECK(subgroup_generator(P, 1) == f17(1));

    for (std::uint64_t order : {1, 2, 4, 8, 16}) {
        std::uint64_t smallest = 0;
        for (std::uint64_t g = 1; g < P && smallest == 0; ++g)
            if (naive_order(g, P) == order) smallest = g;
        CHECK(subgroup_generator(P, order).value() == smallest);
    }
}

TEST_CASE("subgroup_generator rejects orders not dividing p - 1") {
    CHECK_THROWS_AS(subgroup_generator(P, 3), Error);
    try {
        subgroup_generator(P, 32);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DomainUnavailable);
    }
}

TEST_CASE("runtime prime supports large power-of-two subgroups") {
    for (std::uint64_t log : {1, 5, 12, 20, 32}) {
        const std::uint64_t order = std::uint64_t{1} << log;
        const Fp g = subgroup_generator(kRuntimePrime, order);
        Fp acc = g;
        for (std::uint64_t i = 1; i < log; ++i) acc *= acc; // g^(order/2)
        CHECK(acc != Fp::one(kRuntimePrime));
        CHECK(acc * acc == Fp::one(kRuntimePrime));
    }
    CHECK_THROWS_AS(subgroup_generator(kRuntimePrime, std::uint64_t{1} << 33), Error);
}

TEST_CASE("subgroup domain elements are g^1..g^order and distinct") {
    const auto k = SubgroupDomain::of_order(P, 4);
    CHECK(k.elements() == std::vector<Fp>{f17(4), f17(16), f17(13), f17(1)});
    CHECK(k.element(1) == f17(4));
    CHECK(k.element(4) == f17(1));
    CHECK_THROWS_AS(k.element(5), Error);
    CHECK_THROWS_AS(SubgroupDomain(f17(2), 4), Error);
}

TEST_CASE("evaluate uses Horner's rule mod p") {
    const Polynomial x2p1({f17(1), f17(0), f17(1)}, P);
    CHECK(evaluate(x2p1, f17(4)) == f17(0));
    CHECK(evaluate(Polynomial(P), f17(9)) == f17(0));
    CHECK(evaluate(Polynomial::constant(f17(5)), f17(13)) == f17(5));
}

TEST_CASE("polynomials trim trailing zero coefficients") {
    const Polynomial p({f17(3), f17(0), f17(0)}, P);
    CHECK(p.degree() == 0);
    CHECK(Polynomial({f17(0)}, P).is_zero());
    CHECK(Polynomial(P).degree() == -1);
}

TEST_CASE("interpolate examples") {
    const auto k = SubgroupDomain::of_order(P, 4);
    const std::vector<Fp> fives(4, f17(5));
    CHECK(interpolate(k, fives) == Polynomial::constant(f17(5)));

    const auto trivial = SubgroupDomain::of_order(P, 1);
    CHECK(interpolate(trivial, std::vector<Fp>{f17(8)}) == Polynomial::constant(f17(8)));

    const auto identity = interpolate(k, std::vector<Fp>{f17(4), f17(16), f17(13), f17(1)});
    for (const auto& e : k.elements()) CHECK(identity.evaluate(e) == e);
    CHECK(identity == Polynomial({f17(0), f17(1)}, P));

    CHECK_THROWS_AS(interpolate(k, std::vector<Fp>{f17(1), f17(2)}), Error);
}

TEST_CASE("interpolation reproduces random polynomials of degree < d") {
    std::mt19937_64 rng(7);
    for (std::uint64_t p : {P, kRuntimePrime}) {
        for (std::uint64_t d : {1, 2, 4, 8, 16}) {
            const auto domain = SubgroupDomain::of_order(p, d);
            for (int trial = 0; trial < 5; ++trial) {
                const Polynomial q(random_coeffs(rng, d, p), p);
                std::vector<Fp> values;
                for (const auto& e : domain.elements()) values.push_back(q.evaluate(e));
                CHECK(interpolate(domain, values) == q);
            }
        }
    }
}

TEST_CASE("dlog_in_subgroup examples and wrap-around property") {
    CHECK(dlog_in_subgroup(f17(2), f17(8), 8) == 3);
    CHECK(dlog_in_subgroup(f17(2), f17(1), 8) == 8);
    try {
        dlog_in_subgroup(f17(2), f17(3), 8);
        FAIL("expected NotInSubgroup");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotInSubgroup);
    }

    for (std::uint64_t k = 1; k <= 16; ++k) CHECK(dlog_in_subgroup(f17(2), f17(2).pow(k), 8) == ((k - 1) % 8) + 1);

    const auto g = subgroup_generator(kRuntimePrime, 1024);
    const DlogTable table(g, 1024);
    for (std::uint64_t k = 1; k <= 2048; k += 37) CHECK(table.log(g.pow(k)) == ((k - 1) % 1024) + 1);
}

TEST_CASE("field axioms hold on random samples") {
    std::mt19937_64 rng(11);
    for (std::uint64_t p : {P, kRuntimePrime}) {
        for (int i = 0; i < 500; ++i) {
            const Fp a(rng(), p), b(rng(), p), c(rng(), p);
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a - a == Fp::zero(p));
            CHECK(a + (-a) == Fp::zero(p));
            if (!a.is_zero()) {
                CHECK(a * a.inverse() == Fp::one(p));
                CHECK(a.pow(p - 1) == Fp::one(p));
            }
        }
    }
    CHECK_THROWS_AS(Fp::zero(P).inverse(), std::domain_error);
}

TEST_CASE("addition near 2^64 matches 128-bit arithmetic") {
    std::mt19937_64 rng(3);
    const std::uint64_t p = kRuntimePrime;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t a = p - 1 - (rng() % 1000), b = p - 1 - (rng() % 1000);
        const auto expect = static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) + b) % p);
        CHECK((Fp(a, p) + Fp(b, p)).value() == expect);
    }
    CHECK(Fp::from_signed(-1, P) == f17(16));
    CHECK(Fp::from_signed(INT64_MIN, kRuntimePrime) + Fp(std::uint64_t{1} << 63, kRuntimePrime) ==
          Fp::zero(kRuntimePrime));
}

TEST_CASE("canonical element bytes are 8-byte big-endian") {
    CHECK(element_bytes(Fp(0x0102030405060708ULL, kRuntimePrime)) ==
          Bytes{1, 2, 3, 4, 5, 6, 7, 8});
    ByteWriter w;
    write_polynomial(w, Polynomial({f17(5), f17(1)}, P));
    CHECK(w.bytes() == Bytes{0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 5, 0, 0, 0, 0, 0, 0, 0, 1});
    ByteReader r(w.bytes());
    CHECK(r.u32() == 2);
    CHECK(read_element(r, P) == f17(5));
    Bytes unreduced{0, 0, 0, 0, 0, 0, 0, 17};
    ByteReader bad(unreduced);
    CHECK_THROWS_AS(read_element(bad, P), Error);
}
