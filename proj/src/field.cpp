#include "devproof/field.hpp"

#include <stdexcept>
#include <string>

#include "devproof/error.hpp"

namespace devproof::field {

namespace {

void check_same(const Fp& a, const Fp& b) {
    if (a.modulus() != b.modulus()) throw std::logic_error("field elements from different moduli");
}

constexpr std::uint64_t kBruteForceLimit = std::uint64_t{1} << 24;

} // namespace

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t p) {
    std::uint64_t result = 1 % p;
    base %= p;
    while (e != 0) {
        if (e & 1) result = mul_mod(result, base, p);
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    return result;
}

Fp Fp::from_signed(std::int64_t value, std::uint64_t p) {
    if (value >= 0) return {static_cast<std::uint64_t>(value), p};
    // magnitude of INT64_MIN does not fit in int64
    const std::uint64_t mag = static_cast<std::uint64_t>(-(value + 1)) + 1;
    return Fp(0, p) - Fp(mag, p);
}

Fp& Fp::operator+=(const Fp& o) {
    check_same(*this, o);
    const std::uint64_t s = v_ + o.v_;
    // s may wrap for the 64-bit prime
    if (s < v_ || s >= p_) v_ = s - p_;
    else v_ = s;
    return *this;
}

Fp& Fp::operator-=(const Fp& o) {
    check_same(*this, o);
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + (p_ - o.v_);
    return *this;
}

Fp& Fp::operator*=(const Fp& o) {
    check_same(*this, o);
    v_ = mul_mod(v_, o.v_, p_);
    return *this;
}

Fp Fp::pow(std::uint64_t e) const { return {pow_mod(v_, e, p_), p_}; }

Fp Fp::inverse() const {
    if (v_ == 0) throw std::domain_error("inverse of zero");
    return pow(p_ - 2);
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d <= n / d; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

bool has_order(const Fp& g, std::uint64_t order) {
    if (order == 0 || g.is_zero()) return false;
    if (g.pow(order) != Fp::one(g.modulus())) return false;
    for (auto q : prime_factors(order))
        if (g.pow(order / q) == Fp::one(g.modulus())) return false;
    return true;
}

Fp subgroup_generator(std::uint64_t p, std::uint64_t order) {
    if (order == 0 || p < 2 || (p - 1) % order != 0)
        throw Error(ErrorKind::DomainUnavailable,
                    "no subgroup of order " + std::to_string(order) + " in F_" + std::to_string(p));
    if (p - 1 < kBruteForceLimit) {
        for (std::uint64_t g = 1; g < p; ++g)
            if (has_order(Fp(g, p), order)) return {g, p};
    } else {
        const auto factors = prime_factors(p - 1);
        for (std::uint64_t r = 2; r < p; ++r) {
            bool primitive = true;
            for (auto q : factors) {
                if (pow_mod(r, (p - 1) / q, p) == 1) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) return Fp(r, p).pow((p - 1) / order);
        }
    }
    throw Error(ErrorKind::DomainUnavailable, "modulus is not prime");
}

SubgroupDomain::SubgroupDomain(Fp generator, std::uint64_t order) : generator_(generator), order_(order) {
    if (!has_order(generator, order))
        throw Error(ErrorKind::DomainUnavailable, "generator does not have order " + std::to_string(order));
    elements_.reserve(order);
    Fp acc = generator;
    for (std::uint64_t j = 1; j <= order; ++j) {
        elements_.push_back(acc);
        acc *= generator;
    }
}

SubgroupDomain SubgroupDomain::of_order(std::uint64_t p, std::uint64_t order) {
    return {subgroup_generator(p, order), order};
}

const Fp& SubgroupDomain::element(std::uint64_t j) const {
    if (j < 1 || j > order_) throw Error(ErrorKind::IndexError, "domain index " + std::to_string(j));
    return elements_[j - 1];
}

Polynomial::Polynomial(std::vector<Fp> coefficients, std::uint64_t modulus)
    : coeffs_(std::move(coefficients)), p_(modulus) {
    for (const auto& c : coeffs_)
        if (c.modulus() != p_) throw std::logic_error("coefficient modulus mismatch");
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Fp Polynomial::evaluate(const Fp& x) const {
    Fp acc = Fp::zero(p_);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Fp evaluate(const Polynomial& poly, const Fp& x) { return poly.evaluate(x); }

Polynomial interpolate_points(std::span<const Fp> points, std::span<const Fp> values) {
    if (points.size() != values.size())
        throw Error(ErrorKind::ArityError, "interpolation needs one value per point");
    if (points.empty()) throw Error(ErrorKind::ArityError, "interpolation over no points");
    const std::uint64_t p = points.front().modulus();
    const std::size_t d = points.size();

    // vanishing polynomial Z(X) = prod (X - x_i), d+1 coefficients
    std::vector<Fp> vanishing{Fp::one(p)};
    for (const auto& x : points) {
        std::vector<Fp> next(vanishing.size() + 1, Fp::zero(p));
        for (std::size_t k = 0; k < vanishing.size(); ++k) {
            next[k + 1] += vanishing[k];
            next[k] -= vanishing[k] * x;
        }
        vanishing = std::move(next);
    }

    std::vector<Fp> result(d, Fp::zero(p));
    std::vector<Fp> quotient(d, Fp::zero(p));
    for (std::size_t i = 0; i < d; ++i) {
        if (values[i].is_zero()) continue;
        // Z(X) / (X - x_i) by synthetic division, high degree down
        Fp carry = Fp::zero(p);
        for (std::size_t k = d; k-- > 0;) {
            carry = vanishing[k + 1] + carry * points[i];
            quotient[k] = carry;
        }
        Fp denom = Fp::zero(p);
        for (std::size_t k = d; k-- > 0;) denom = denom * points[i] + quotient[k];
        const Fp scale = values[i] * denom.inverse();
        for (std::size_t k = 0; k < d; ++k) result[k] += scale * quotient[k];
    }
    return Polynomial(std::move(result), p);
}

Polynomial interpolate(const SubgroupDomain& domain, std::span<const Fp> values) {
    if (values.size() != domain.order())
        throw Error(ErrorKind::ArityError, "expected " + std::to_string(domain.order()) + " values, got " +
                                               std::to_string(values.size()));
    return interpolate_points(domain.elements(), values);
}

DlogTable::DlogTable(const Fp& base, std::uint64_t order) : modulus_(base.modulus()) {
    if (order == 0 || order > kMaxDlogOrder) throw Error(ErrorKind::TooLarge, "dlog table order out of range");
    table_.reserve(order);
    Fp acc = base;
    for (std::uint64_t k = 1; k <= order; ++k) {
        table_.emplace(acc.value(), k);
        acc *= base;
    }
}

std::uint64_t DlogTable::log(const Fp& elem) const {
    auto it = table_.find(elem.value());
    if (elem.modulus() != modulus_ || it == table_.end())
        throw Error(ErrorKind::NotInSubgroup, std::to_string(elem.value()) + " is not in the subgroup");
    return it->second;
}

std::uint64_t dlog_in_subgroup(const Fp& base, const Fp& elem, std::uint64_t order) {
    return DlogTable(base, order).log(elem);
}

void write_element(ByteWriter& out, const Fp& x) { out.u64(x.value()); }

Fp read_element(ByteReader& in, std::uint64_t modulus) {
    const std::uint64_t v = in.u64();
    if (v >= modulus) throw Error(ErrorKind::EncodingError, "field element not reduced");
    return {v, modulus};
}

Bytes element_bytes(const Fp& x) {
    ByteWriter w;
    write_element(w, x);
    return std::move(w).take();
}

void write_polynomial(ByteWriter& out, const Polynomial& poly) {
    out.u32(static_cast<std::uint32_t>(poly.coefficients().size()));
    for (const auto& c : poly.coefficients()) write_element(out, c);
}

} // namespace devproof::field
