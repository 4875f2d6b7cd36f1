#include "devproof/device.hpp"

#include "devproof/hash.hpp"

namespace devproof::device {

namespace {

constexpr std::pair<Tamper, std::string_view> kTamperNames[] = {
    {Tamper::None, "none"},
    {Tamper::ForgeOutput, "forge_output"},
    {Tamper::CorruptProof, "corrupt_proof"},
    {Tamper::RogueKey, "rogue_key"},
    {Tamper::SwapFirmware, "swap_firmware"},
    {Tamper::AlterMetadata, "alter_metadata"},
};

// the program a compromised device runs instead: squares its output once more
r1cs::GateProgram swapped(const r1cs::GateProgram& prog) {
    r1cs::GateProgram out = prog;
    out.gates.push_back({r1cs::GateOp::Mul, prog.output, prog.output, 0});
    out.output = out.num_wires() - 1;
    return out;
}

} // namespace

std::string_view to_string(Tamper t) {
    for (auto [k, name] : kTamperNames)
        if (k == t) return name;
    return "?";
}

Tamper parse_tamper(std::string_view s) {
    for (auto [k, name] : kTamperNames)
        if (name == s) return k;
    throw Error(ErrorKind::ConfigError, "unknown tamper directive '" + std::string(s) + "'");
}

DeviceIdentity make_device(std::string id, std::string device_type, r1cs::GateProgram firmware,
                           std::uint64_t modulus, bool binds_metadata, std::uint32_t lambda) {
    DeviceIdentity dev;
    dev.id = std::move(id);
    dev.device_type = std::move(device_type);
    dev.binds_metadata = binds_metadata;
    dev.keys = fc::setup(lambda, r1cs::build_program(firmware, modulus, binds_metadata ? 1 : 0));
    dev.firmware = std::move(firmware);
    return dev;
}

Fp encode_reading(const SensorReading& reading, std::int64_t scale, std::uint64_t modulus) {
    const __int128 v = static_cast<__int128>(reading.raw) * scale;
    const __int128 mag = v < 0 ? -v : v;
    if (mag >= static_cast<__int128>(modulus))
        throw Error(ErrorKind::RangeError, "reading " + std::to_string(reading.raw) + " on '" + reading.channel +
                                               "' does not fit the field");
    return Fp::from_signed(static_cast<std::int64_t>(v), modulus);
}

Bytes encode_metadata(const Metadata& meta) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(meta.size()));
    for (const auto& [k, v] : meta) {
        w.str(k);
        w.str(v);
    }
    return std::move(w).take();
}

Fp metadata_hash(const Metadata& meta, std::uint64_t modulus) {
    const auto d = sha256(encode_metadata(meta));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
    return {v % modulus, modulus};
}

std::pair<Fp, r1cs::Assignment> execute_firmware(const DeviceIdentity& dev, std::span<const Fp> inputs,
                                                 std::span<const Fp> bound) {
    const auto wires = r1cs::execute(dev.firmware, inputs);
    std::vector<Fp> pad;
    if (dev.binds_metadata && bound.empty()) {
        pad.push_back(Fp::zero(dev.keys.pp.modulus));
        bound = pad;
    }
    auto z = r1cs::make_assignment(dev.firmware, inputs, bound);
    if (!r1cs::is_satisfied(dev.keys.pk.instance, z))
        throw std::logic_error("firmware execution does not satisfy its own circuit");
    return {wires[dev.firmware.output], std::move(z)};
}

DataBundle emit_bundle(const DeviceIdentity& dev, std::span<const Fp> inputs, const Metadata& meta, Tamper tamper) {
    const auto p = dev.keys.pp.modulus;
    std::vector<Fp> bound;
    if (dev.binds_metadata) bound.push_back(metadata_hash(meta, p));

    DataBundle out;
    out.producer = dev.id;
    out.metadata = meta;
    out.vk_digest = dev.vk_digest();

    const fc::ProvingKey* pk = &dev.keys.pk;
    fc::Keys other;
    r1cs::GateProgram prog = dev.firmware;
    if (tamper == Tamper::RogueKey) {
        other = fc::setup(dev.keys.pp.lambda + 1, dev.keys.pk.instance);
        pk = &other.pk;
        out.vk_digest = other.vk.digest;
    } else if (tamper == Tamper::SwapFirmware) {
        prog = swapped(dev.firmware);
        other = fc::setup(dev.keys.pp.lambda, r1cs::build_program(prog, p, dev.binds_metadata ? 1 : 0));
        pk = &other.pk;
    }

    const auto wires = r1cs::execute(prog, inputs);
    const auto z = r1cs::make_assignment(prog, inputs, bound);
    out.publics.assign(inputs.begin(), inputs.end());
    out.publics.push_back(wires[prog.output]);
    out.publics.insert(out.publics.end(), bound.begin(), bound.end());
    out.proof = fc::encode_bundle(fc::prove(*pk, z));

    switch (tamper) {
    case Tamper::ForgeOutput: {
        auto& y = out.publics[inputs.size()];
        y = y + Fp::one(p);
        break;
    }
    case Tamper::CorruptProof:
        out.proof[out.proof.size() / 2] ^= 0x5a;
        break;
    case Tamper::AlterMetadata:
        if (out.metadata.contains("gps"))
            out.metadata["gps"] = "45520000,-122680000";
        else
            out.metadata["gps"] = "0,0";
        break;
    default:
        break;
    }
    return out;
}

Bytes encode_payload(const DataBundle& b) {
    ByteWriter w;
    w.str(b.producer);
    w.u32(static_cast<std::uint32_t>(b.publics.size()));
    for (const auto& x : b.publics) field::write_element(w, x);
    w.raw(encode_metadata(b.metadata));
    w.digest(b.vk_digest);
    return std::move(w).take();
}

Bytes encode_bundle(const DataBundle& b) {
    ByteWriter w;
    w.raw(encode_payload(b));
    w.blob(b.proof);
    return std::move(w).take();
}

DataBundle decode_bundle(std::span<const std::uint8_t> bytes, std::uint64_t modulus) {
    ByteReader r(bytes);
    DataBundle b;
    b.producer = r.str();
    const auto n = r.u32();
    if (n > fc::kMaxConstraints) throw Error(ErrorKind::EncodingError, "too many publics");
    for (std::uint32_t i = 0; i < n; ++i) b.publics.push_back(field::read_element(r, modulus));
    const auto entries = r.u32();
    for (std::uint32_t i = 0; i < entries; ++i) {
        auto k = r.str();
        auto v = r.str();
        if (!b.metadata.empty() && k <= b.metadata.rbegin()->first)
            throw Error(ErrorKind::EncodingError, "metadata keys out of order");
        b.metadata.emplace(std::move(k), std::move(v));
    }
    b.vk_digest = r.digest();
    const auto proof = r.blob();
    b.proof.assign(proof.begin(), proof.end());
    r.expect_done();
    return b;
}

} // namespace devproof::device
