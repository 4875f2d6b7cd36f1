#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "devproof/fc_scheme.hpp"

namespace devproof::pcd {

using field::Fp;

/// One device's contribution to f^T: its public inputs x_i, output y_i, proofs,
/// and where y_i must reappear in x_{i+1} (1-based; 0 on the final step).
struct ChainStep {
    std::uint32_t index = 0;
    Digest vk_digest{};
    std::vector<Fp> inputs;
    Fp output;
    fc::ProofBundle proofs;
    std::uint32_t link_position = 0;
};

struct ChainProof {
    std::uint64_t modulus = field::kRuntimePrime;
    std::vector<ChainStep> steps;
    Fp final_claim;

    std::uint32_t length() const { return static_cast<std::uint32_t>(steps.size()); }
};

using KeyRegistry = std::map<Digest, fc::VerificationKey>;

/// Appends without verifying proofs. Throws SequenceError on an index gap and
/// LinkError when the previous output is not at the declared position.
ChainProof extend_chain(ChainProof chain, ChainStep step);

/// Checks every step's proofs (in parallel), then folds the link checks.
/// Throws UnknownKey when a step's vk digest is not in the registry.
Verdict verify_chain(const ChainProof& chain, const KeyRegistry& registry);

/// Runs `prog` on `inputs` and proves the result as step `index`.
ChainStep make_step(std::uint32_t index, const r1cs::GateProgram& prog, const fc::Keys& keys,
                    std::span<const Fp> inputs, std::uint32_t link_position);

Bytes encode_step(const ChainStep& step);
ChainStep decode_step(std::span<const std::uint8_t> bytes, std::uint64_t modulus);
Bytes encode_chain(const ChainProof& chain);
ChainProof decode_chain(std::span<const std::uint8_t> bytes);
Digest chain_digest(const ChainProof& chain);

} // namespace devproof::pcd
