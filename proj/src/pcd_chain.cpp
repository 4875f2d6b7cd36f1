#include "devproof/pcd_chain.hpp"

#include <future>
#include <string>

#include "devproof/hash.hpp"

namespace devproof::pcd {

namespace {

std::string at_step(std::uint32_t i, const std::string& what) { return "step " + std::to_string(i) + ": " + what; }

Verdict verify_step(const ChainStep& step, const fc::VerificationKey& vk) {
    if (vk.public_positions.size() != step.inputs.size() + 1) return Verdict::reject("public arity");
    std::vector<Fp> publics = step.inputs;
    publics.push_back(step.output);
    return fc::verify(vk, step.proofs, publics);
}

} // namespace

ChainProof extend_chain(ChainProof chain, ChainStep step) {
    if (step.index != chain.length() + 1)
        throw Error(ErrorKind::SequenceError, "expected step " + std::to_string(chain.length() + 1) + ", got " +
                                                  std::to_string(step.index));
    if (!chain.steps.empty()) {
        const ChainStep& prev = chain.steps.back();
        const auto pos = prev.link_position;
        if (pos == 0 || pos > step.inputs.size())
            throw Error(ErrorKind::LinkError, "link position " + std::to_string(pos) + " outside step " +
                                                  std::to_string(step.index) + "'s inputs");
        if (step.inputs[pos - 1] != prev.output)
            throw Error(ErrorKind::LinkError, "step " + std::to_string(step.index) + " input " + std::to_string(pos) +
                                                  " does not carry the previous output");
    } else {
        chain.modulus = step.output.modulus();
    }
    chain.final_claim = step.output;
    chain.steps.push_back(std::move(step));
    return chain;
}

Verdict verify_chain(const ChainProof& chain, const KeyRegistry& registry) {
    if (chain.steps.empty()) return Verdict::reject("empty chain");

    std::vector<const fc::VerificationKey*> keys;
    for (const auto& step : chain.steps) {
        auto it = registry.find(step.vk_digest);
        if (it == registry.end())
            throw Error(ErrorKind::UnknownKey, "no verification key for step " + std::to_string(step.index));
        keys.push_back(&it->second);
    }

    std::vector<std::future<Verdict>> pending;
    for (std::size_t i = 0; i < chain.steps.size(); ++i)
        pending.push_back(std::async(std::launch::async, verify_step, std::cref(chain.steps[i]), std::cref(*keys[i])));
    std::vector<Verdict> results;
    for (auto& f : pending) results.push_back(f.get());

    for (std::size_t i = 0; i < chain.steps.size(); ++i) {
        const ChainStep& step = chain.steps[i];
        const auto number = static_cast<std::uint32_t>(i + 1);
        if (step.index != number) return Verdict::reject(at_step(number, "sequence"));
        if (!results[i]) return Verdict::reject(at_step(number, results[i].reason));
        const bool last = i + 1 == chain.steps.size();
        if (last) {
            if (step.link_position != 0) return Verdict::reject(at_step(number, "dangling link"));
            if (step.output != chain.final_claim) return Verdict::reject(at_step(number, "final claim"));
        } else {
            const ChainStep& next = chain.steps[i + 1];
            const auto pos = step.link_position;
            if (pos == 0 || pos > next.inputs.size() || next.inputs[pos - 1] != step.output)
                return Verdict::reject(at_step(number, "link"));
        }
    }
    return Verdict::accept();
}

ChainStep make_step(std::uint32_t index, const r1cs::GateProgram& prog, const fc::Keys& keys,
                    std::span<const Fp> inputs, std::uint32_t link_position) {
    const auto z = r1cs::make_assignment(prog, inputs);
    ChainStep step;
    step.index = index;
    step.vk_digest = keys.vk.digest;
    step.inputs.assign(inputs.begin(), inputs.end());
    step.output = r1cs::execute(prog, inputs)[prog.output];
    step.proofs = fc::prove(keys.pk, z);
    step.link_position = link_position;
    return step;
}

Bytes encode_step(const ChainStep& step) {
    ByteWriter w;
    w.u32(step.index);
    w.digest(step.vk_digest);
    w.u32(static_cast<std::uint32_t>(step.inputs.size()));
    for (const auto& x : step.inputs) field::write_element(w, x);
    field::write_element(w, step.output);
    w.u32(step.link_position);
    w.blob(fc::encode_bundle(step.proofs));
    return std::move(w).take();
}

ChainStep decode_step(std::span<const std::uint8_t> bytes, std::uint64_t modulus) {
    ByteReader r(bytes);
    ChainStep step;
    step.index = r.u32();
    step.vk_digest = r.digest();
    const auto count = r.u32();
    if (count > fc::kMaxConstraints) throw Error(ErrorKind::EncodingError, "input count too large");
    for (std::uint32_t i = 0; i < count; ++i) step.inputs.push_back(field::read_element(r, modulus));
    step.output = field::read_element(r, modulus);
    step.link_position = r.u32();
    step.proofs = fc::decode_bundle(r.blob(), modulus);
    r.expect_done();
    return step;
}

Bytes encode_chain(const ChainProof& chain) {
    ByteWriter w;
    w.u64(chain.modulus);
    w.u32(chain.length());
    field::write_element(w, chain.final_claim);
    for (const auto& step : chain.steps) w.blob(encode_step(step));
    return std::move(w).take();
}

ChainProof decode_chain(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    ChainProof chain;
    chain.modulus = r.u64();
    if (chain.modulus < 3) throw Error(ErrorKind::EncodingError, "bad modulus");
    const auto count = r.u32();
    chain.final_claim = field::read_element(r, chain.modulus);
    for (std::uint32_t i = 0; i < count; ++i) chain.steps.push_back(decode_step(r.blob(), chain.modulus));
    r.expect_done();
    return chain;
}

Digest chain_digest(const ChainProof& chain) { return sha256(encode_chain(chain)); }

} // namespace devproof::pcd
