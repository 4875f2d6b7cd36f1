#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "devproof/bytes.hpp"
#include "devproof/error.hpp"
#include "devproof/field.hpp"

namespace devproof::ledger {

enum class RecordKind : std::uint8_t { Genesis = 0, Contract = 1, Proof = 2, Escrow = 3 };

std::string_view to_string(RecordKind k);

struct Record {
    RecordKind kind = RecordKind::Genesis;
    std::string origin;
    Bytes payload;

    Digest digest() const;
};

struct Block {
    std::uint64_t height = 0;
    Digest prev{};
    std::vector<Record> records;

    Bytes encode() const;
    Digest digest() const;
};

/// Replicated, append-only block store.
class HotStore {
public:
    void append(Block block);
    const std::vector<Block>& blocks() const { return blocks_; }
    std::uint64_t height() const { return blocks_.empty() ? 0 : blocks_.back().height; }
    /// Throws NotFound.
    const Record& record(std::uint64_t height, std::uint32_t index) const;
    /// Recomputes every previous-digest link.
    bool links_intact() const;

private:
    std::vector<Block> blocks_;
};

/// Node-local device data; never replicated.
class ColdStore {
public:
    void put(const std::string& device, Bytes payload) { data_[device] = std::move(payload); }
    const Bytes* get(const std::string& device) const;
    const std::map<std::string, Bytes>& entries() const { return data_; }

private:
    std::map<std::string, Bytes> data_;
};

enum class EscrowState { Open, Releasable, Withdrawn, Refunded };

std::string_view to_string(EscrowState s);

struct EscrowAccount {
    std::string session;
    std::string depositor;
    std::string beneficiary;
    std::int64_t amount = 0;
    EscrowState state = EscrowState::Open;
    bool failed = false;

    bool operator==(const EscrowAccount&) const = default;
};

struct Location {
    std::uint64_t height = 0;
    std::uint32_t index = 0;

    bool operator==(const Location&) const = default;
};

/// One sequencer: mutations queue records, seal() cuts a block and copies it
/// to every node's hot store.
class Ledger {
public:
    explicit Ledger(std::vector<std::string> nodes, std::uint64_t modulus = field::kRuntimePrime);

    const std::vector<std::string>& nodes() const { return nodes_; }
    std::uint64_t modulus() const { return modulus_; }

    void mint(const std::string& account, std::int64_t amount);
    std::int64_t balance(const std::string& account) const;
    const std::map<std::string, std::int64_t>& balances() const { return balances_; }

    EscrowAccount deposit(const std::string& session, const std::string& depositor, const std::string& beneficiary,
                          std::int64_t amount);
    bool verify_funds(const std::string& session, std::int64_t required) const;
    void mark_failed(const std::string& session);
    EscrowAccount release(const std::string& session);
    EscrowAccount withdraw(const std::string& session, const std::string& caller);
    EscrowAccount refund(const std::string& session);
    const EscrowAccount& escrow(const std::string& session) const;
    bool has_escrow(const std::string& session) const { return escrows_.contains(session); }
    const std::map<std::string, EscrowAccount>& escrows() const { return escrows_; }

    void register_contract(const std::string& node, const std::string& id, std::span<const std::uint8_t> body);
    /// Validates that the bytes decode as a proof bundle; throws EncodingError.
    Location append_proof(const std::string& node, std::span<const std::uint8_t> proof);
    /// From `node`'s replica; only sealed records are visible. Throws NotFound.
    Bytes read_proof(const std::string& node, std::uint64_t height, std::uint32_t index) const;

    /// Seals pending records into a block (if any) and replicates it.
    /// Returns true when a block was cut.
    bool seal();
    std::size_t pending() const { return pending_.size(); }

    const HotStore& hot(const std::string& node) const;
    ColdStore& cold(const std::string& node);
    const ColdStore& cold(const std::string& node) const;

    /// Balances plus open and releasable escrow.
    std::int64_t total_tokens() const;

    /// `height|index|kind|digest-hex`, one line per record.
    std::string dump_records() const;
    /// `session|state|amount|depositor|beneficiary`, one line per escrow.
    std::string escrow_table() const;

private:
    Location queue(RecordKind kind, const std::string& origin, Bytes payload);
    void log_escrow(const std::string& op, const EscrowAccount& e);
    EscrowAccount& find(const std::string& session);
    std::size_t node_index(const std::string& node) const;

    std::vector<std::string> nodes_;
    std::uint64_t modulus_;
    std::vector<HotStore> hot_;
    std::vector<ColdStore> cold_;
    Block chain_tip_;
    std::vector<Record> pending_;
    std::map<std::string, std::int64_t> balances_;
    std::map<std::string, EscrowAccount> escrows_;
};

} // namespace devproof::ledger
