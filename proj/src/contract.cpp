#include "devproof/contract.hpp"

#include <charconv>

namespace devproof::contract {

namespace {

bool guard_holds(const Guard& g, const ContractSpec& spec, const device::Metadata& meta) {
    auto it = meta.find(g.field);
    if (it == meta.end()) return false;
    if (g.predicate == Predicate::Equals) return it->second == g.constant;
    const auto at = parse_gps(it->second);
    if (!at) return false;
    const auto city = city_lookup(spec.geo, at->first, at->second);
    return city && *city == g.constant;
}

} // namespace

Predicate parse_predicate(std::string_view s) {
    if (s == "equals") return Predicate::Equals;
    if (s == "in-bbox") return Predicate::InBox;
    throw Error(ErrorKind::ConfigError, "unknown predicate '" + std::string(s) + "'");
}

std::string_view to_string(Predicate p) { return p == Predicate::Equals ? "equals" : "in-bbox"; }

void validate(const ContractSpec& spec) {
    for (const auto& box : spec.geo)
        if (box.lat_min >= box.lat_max || box.lon_min >= box.lon_max)
            throw Error(ErrorKind::ConfigError, "contract " + spec.id + ": degenerate box for " + box.city);
    for (const auto& g : spec.guards)
        if (g.predicate == Predicate::InBox && g.field.empty())
            throw Error(ErrorKind::ConfigError, "contract " + spec.id + ": guard " + g.name + " has no field");
    for (const auto& [from, to] : spec.forward)
        if (from.empty() || to.empty())
            throw Error(ErrorKind::ConfigError, "contract " + spec.id + ": empty forward mapping");
}

Verdict compliance_check(const ComplianceRegistry& registry, const device::DataBundle& bundle,
                         const std::string& claimed_type) {
    auto it = registry.find(claimed_type);
    if (it == registry.end()) return Verdict::reject("unknown-type");
    if (!it->second.contains(bundle.vk_digest)) {
        for (const auto& [type, digests] : registry)
            if (digests.contains(bundle.vk_digest)) return Verdict::reject("type-mismatch");
        return Verdict::reject("unregistered");
    }
    auto dt = bundle.metadata.find("device_type");
    if (dt == bundle.metadata.end() || dt->second != claimed_type) return Verdict::reject("type-mismatch");
    if (bundle.publics.empty()) return Verdict::reject("metadata-hash");
    const auto p = bundle.publics.back().modulus();
    if (device::metadata_hash(bundle.metadata, p) != bundle.publics.back()) return Verdict::reject("metadata-hash");
    return Verdict::accept();
}

std::optional<std::string> city_lookup(const GeoTable& geo, std::int64_t lat, std::int64_t lon) {
    for (const auto& box : geo)
        if (lat >= box.lat_min && lat <= box.lat_max && lon >= box.lon_min && lon <= box.lon_max) return box.city;
    return std::nullopt;
}

std::optional<std::pair<std::int64_t, std::int64_t>> parse_gps(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return std::nullopt;
    std::int64_t lat = 0, lon = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto r1 = std::from_chars(b, b + comma, lat);
    auto r2 = std::from_chars(b + comma + 1, e, lon);
    if (r1.ec != std::errc{} || r1.ptr != b + comma || r2.ec != std::errc{} || r2.ptr != e) return std::nullopt;
    return std::pair{lat, lon};
}

Decision evaluate_contract(const ContractSpec& spec, const ComplianceRegistry& registry,
                           const device::DataBundle& bundle, const fc::VerificationKey& vk) {
    if (bundle.vk_digest != vk.digest || !fc::verify_bundle_bytes(vk, bundle.proof, bundle.publics))
        return Decision::reject("proof");

    if (auto c = compliance_check(registry, bundle, spec.required_device_type); !c)
        return Decision::reject("compliance:" + c.reason);

    for (const auto& g : spec.guards)
        if (!guard_holds(g, spec, bundle.metadata)) return Decision::reject("guard:" + g.name);

    Decision d;
    d.forwarded = true;
    d.next_hop = spec.next_hop;
    for (const auto& [from, to] : spec.forward) {
        auto it = bundle.metadata.find(from);
        if (it == bundle.metadata.end()) return Decision::reject("missing:" + from);
        d.outputs[to] = it->second;
    }
    return d;
}

} // namespace devproof::contract
