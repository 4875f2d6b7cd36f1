#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "devproof/fc_scheme.hpp"

namespace devproof::device {

using field::Fp;
using Metadata = std::map<std::string, std::string>;

struct SensorReading {
    std::string channel;
    std::int64_t raw = 0;
    std::uint64_t tick = 0;
};

enum class Tamper { None, ForgeOutput, CorruptProof, RogueKey, SwapFirmware, AlterMetadata };

std::string_view to_string(Tamper t);
Tamper parse_tamper(std::string_view s);

/// A zk-Device. When `binds_metadata` is set the circuit carries one extra
/// public column holding metadata_hash(metadata), so proofs commit to it.
struct DeviceIdentity {
    std::string id;
    std::string device_type;
    r1cs::GateProgram firmware;
    bool binds_metadata = true;
    fc::Keys keys;

    const Digest& vk_digest() const { return keys.vk.digest; }
};

DeviceIdentity make_device(std::string id, std::string device_type, r1cs::GateProgram firmware,
                           std::uint64_t modulus = field::kRuntimePrime, bool binds_metadata = true,
                           std::uint32_t lambda = 128);

/// raw * scale embedded into F_p (negatives wrap). RangeError unless |raw * scale| < p.
Fp encode_reading(const SensorReading& reading, std::int64_t scale, std::uint64_t modulus);

/// Canonical metadata encoding: sorted (key, value) pairs, length-prefixed.
Bytes encode_metadata(const Metadata& meta);
/// First eight bytes of SHA-256 over encode_metadata, reduced mod p.
Fp metadata_hash(const Metadata& meta, std::uint64_t modulus);

/// Forward-executes the firmware. `bound` fills the trailing public columns
/// when the device binds metadata.
std::pair<Fp, r1cs::Assignment> execute_firmware(const DeviceIdentity& dev, std::span<const Fp> inputs,
                                                 std::span<const Fp> bound = {});

struct DataBundle {
    std::string producer;
    std::vector<Fp> publics; // inputs, output, then the metadata hash if bound
    Metadata metadata;
    Bytes proof;             // encoded fc::ProofBundle
    Digest vk_digest{};

    const Fp& output(bool binds_metadata = true) const { return publics[publics.size() - (binds_metadata ? 2 : 1)]; }
};

DataBundle emit_bundle(const DeviceIdentity& dev, std::span<const Fp> inputs, const Metadata& meta,
                       Tamper tamper = Tamper::None);

Bytes encode_bundle(const DataBundle& b);
DataBundle decode_bundle(std::span<const std::uint8_t> bytes, std::uint64_t modulus);
/// Everything except the proof: what a node keeps in cold storage.
Bytes encode_payload(const DataBundle& b);

} // namespace devproof::device
