#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "devproof/contract.hpp"
#include "devproof/device.hpp"
#include "devproof/ledger.hpp"
#include "devproof/relayer.hpp"

namespace devproof::world {

struct DeviceSetup {
    device::DeviceIdentity identity;
    std::string node;
    std::vector<device::SensorReading> readings;
    std::int64_t scale = 1;
    device::Metadata metadata;
    device::Tamper tamper = device::Tamper::None;
};

struct ContractSetup {
    contract::ContractSpec spec;
    std::string node;
};

struct SessionSetup {
    std::string id;
    std::string device_a;
    std::string device_b;
    std::string contract_x;
    std::string contract_y;
    std::int64_t amount = 0;
    std::int64_t deposit = 0;
    std::uint64_t start = 0;
    std::string expect;
};

struct Faults {
    std::uint32_t drop_per_mille = 0;
    std::uint32_t max_delay = 0;
};

struct WorldConfig {
    std::uint64_t seed = 0;
    std::uint64_t modulus = field::kRuntimePrime;
    std::vector<std::string> nodes;
    std::map<std::string, DeviceSetup> devices;
    std::map<std::string, ContractSetup> contracts;
    contract::ComplianceRegistry registry;
    std::map<std::string, std::int64_t> balances;
    std::uint64_t timeout = 50;
    std::uint64_t release_delay = 2;
    Faults faults;
    std::vector<SessionSetup> sessions;
};

/// Wall-clock samples in microseconds. Never part of any deterministic output.
struct Metrics {
    std::map<std::string, std::vector<std::int64_t>> phases;
    std::size_t accepts = 0;
    std::size_t rejects = 0;

    void add(const std::string& phase, std::int64_t us) { phases[phase].push_back(us); }
};

inline const std::vector<std::string> kPhases{"prove", "verify", "write", "confirm", "read", "session"};

struct SessionOutcome {
    relayer::Session session;
    std::map<std::string, std::string> forwarded;
    std::vector<std::string> violations;
    std::uint64_t finished_at = 0;
};

struct RunResult {
    std::vector<std::string> transcript; // `tick|session|state|kind|sender>recipient|digest`
    std::vector<SessionOutcome> sessions;
    ledger::Ledger ledger{{"none"}};
    Metrics metrics;
    std::uint64_t ticks = 0;

    std::string transcript_text() const;
    /// One line per session: `session|state|expected`.
    std::string sessions_text(const std::vector<SessionSetup>& setups) const;
};

/// Cross-reference checks; throws ConfigError naming the first bad field.
void validate(const WorldConfig& cfg);

RunResult run(const WorldConfig& cfg);

} // namespace devproof::world
