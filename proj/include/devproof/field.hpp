#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "devproof/bytes.hpp"

namespace devproof::field {

/// 2^64 - 2^32 + 1: 2-adicity 32, so power-of-two subgroups up to 2^32 exist.
inline constexpr std::uint64_t kRuntimePrime = 0xFFFFFFFF00000001ULL;
/// Small prime used for hand-checkable examples and exhaustive tests.
inline constexpr std::uint64_t kTestPrime = 17;

/// Element of F_p. The modulus travels with the value so that the runtime
/// prime and the test prime can coexist in one process.
class Fp {
public:
    Fp() = default;
    Fp(std::uint64_t value, std::uint64_t modulus) : v_(value % modulus), p_(modulus) {}

    static Fp zero(std::uint64_t p) { return {0, p}; }
    static Fp one(std::uint64_t p) { return {1, p}; }
    /// Reduces a signed integer into [0, p).
    static Fp from_signed(std::int64_t value, std::uint64_t p);

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return p_; }
    bool is_zero() const { return v_ == 0; }

    Fp& operator+=(const Fp& o);
    Fp& operator-=(const Fp& o);
    Fp& operator*=(const Fp& o);

    friend Fp operator+(Fp a, const Fp& b) { return a += b; }
    friend Fp operator-(Fp a, const Fp& b) { return a -= b; }
    friend Fp operator*(Fp a, const Fp& b) { return a *= b; }
    Fp operator-() const { return Fp(0, p_) - *this; }

    friend bool operator==(const Fp& a, const Fp& b) { return a.v_ == b.v_ && a.p_ == b.p_; }

    Fp pow(std::uint64_t e) const;
    /// Fermat inverse; throws std::domain_error on zero.
    Fp inverse() const;

private:
    std::uint64_t v_ = 0;
    std::uint64_t p_ = kRuntimePrime;
};

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t p);

/// Distinct prime factors of n, ascending (trial division).
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// True iff g has multiplicative order exactly `order`.
bool has_order(const Fp& g, std::uint64_t order);

/// Generator of the unique subgroup of F_p^* with the given order.
/// For p - 1 < 2^24 this is the smallest such generator by integer value;
/// for larger primes it is r^((p-1)/order) with r the smallest primitive root.
Fp subgroup_generator(std::uint64_t p, std::uint64_t order);

/// {g^1, g^2, ..., g^order}; indexing is 1-based to match the encodings.
class SubgroupDomain {
public:
    /// Trivial domain {1} in the runtime field.
    SubgroupDomain() : SubgroupDomain(Fp::one(kRuntimePrime), 1) {}
    SubgroupDomain(Fp generator, std::uint64_t order);
    static SubgroupDomain of_order(std::uint64_t p, std::uint64_t order);

    const Fp& generator() const { return generator_; }
    std::uint64_t order() const { return order_; }
    std::uint64_t modulus() const { return generator_.modulus(); }
    const std::vector<Fp>& elements() const { return elements_; }
    /// g^j for 1 <= j <= order.
    const Fp& element(std::uint64_t j) const;

private:
    Fp generator_;
    std::uint64_t order_;
    std::vector<Fp> elements_;
};

/// Coefficients low-degree first; trailing zeros are trimmed so the zero
/// polynomial has no coefficients.
class Polynomial {
public:
    explicit Polynomial(std::uint64_t modulus = kRuntimePrime) : p_(modulus) {}
    Polynomial(std::vector<Fp> coefficients, std::uint64_t modulus);
    static Polynomial constant(const Fp& c) { return Polynomial({c}, c.modulus()); }

    const std::vector<Fp>& coefficients() const { return coeffs_; }
    std::uint64_t modulus() const { return p_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// -1 for the zero polynomial.
    long degree() const { return static_cast<long>(coeffs_.size()) - 1; }

    Fp evaluate(const Fp& x) const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.p_ == b.p_ && a.coeffs_ == b.coeffs_;
    }

private:
    std::vector<Fp> coeffs_;
    std::uint64_t p_;
};

Fp evaluate(const Polynomial& poly, const Fp& x);

/// Lagrange interpolation through (points[j], values[j]); O(d^2).
Polynomial interpolate_points(std::span<const Fp> points, std::span<const Fp> values);
/// q with q(domain.element(j)) = values[j-1]; throws ArityError on length mismatch.
Polynomial interpolate(const SubgroupDomain& domain, std::span<const Fp> values);

/// Precomputed power table of a subgroup generator.
class DlogTable {
public:
    DlogTable(const Fp& base, std::uint64_t order);
    /// k in [1, order] with base^k = elem; throws NotInSubgroup.
    std::uint64_t log(const Fp& elem) const;
    bool contains(const Fp& elem) const { return table_.count(elem.value()) != 0; }

private:
    std::uint64_t modulus_;
    std::unordered_map<std::uint64_t, std::uint64_t> table_;
};

inline constexpr std::uint64_t kMaxDlogOrder = std::uint64_t{1} << 20;

std::uint64_t dlog_in_subgroup(const Fp& base, const Fp& elem, std::uint64_t order);

void write_element(ByteWriter& out, const Fp& x);
Fp read_element(ByteReader& in, std::uint64_t modulus);
Bytes element_bytes(const Fp& x);
void write_polynomial(ByteWriter& out, const Polynomial& poly);

} // namespace devproof::field
