#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "devproof/device.hpp"

namespace devproof::contract {

/// Bounds in micro-degrees, inclusive on every edge.
struct GeoBox {
    std::string city;
    std::int64_t lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
};

using GeoTable = std::vector<GeoBox>;

enum class Predicate { Equals, InBox };

struct Guard {
    std::string name;
    std::string field;
    Predicate predicate = Predicate::Equals;
    std::string constant;
};

struct ContractSpec {
    std::string id;
    std::string required_device_type;
    std::vector<Guard> guards;
    std::vector<std::pair<std::string, std::string>> forward; // bundle field -> output field
    std::string next_hop;
    GeoTable geo;
};

/// Throws ConfigError on degenerate boxes or unknown predicate inputs.
void validate(const ContractSpec& spec);

using ComplianceRegistry = std::map<std::string, std::set<Digest>>;

struct Decision {
    bool forwarded = false;
    std::map<std::string, std::string> outputs;
    std::string next_hop;
    std::string reason;

    static Decision reject(std::string why) { return {false, {}, {}, std::move(why)}; }
};

Verdict compliance_check(const ComplianceRegistry& registry, const device::DataBundle& bundle,
                         const std::string& claimed_type);

std::optional<std::string> city_lookup(const GeoTable& geo, std::int64_t lat, std::int64_t lon);

/// Parses "lat,lon" in micro-degrees.
std::optional<std::pair<std::int64_t, std::int64_t>> parse_gps(const std::string& text);

/// Proof, then compliance, then guards in declaration order, then forwarding.
Decision evaluate_contract(const ContractSpec& spec, const ComplianceRegistry& registry,
                           const device::DataBundle& bundle, const fc::VerificationKey& vk);

Predicate parse_predicate(std::string_view s);
std::string_view to_string(Predicate p);

} // namespace devproof::contract
