#include "devproof/ledger.hpp"

#include <algorithm>

#include "devproof/fc_scheme.hpp"
#include "devproof/hash.hpp"

namespace devproof::ledger {

std::string_view to_string(RecordKind k) {
    switch (k) {
    case RecordKind::Genesis: return "genesis";
    case RecordKind::Contract: return "contract";
    case RecordKind::Proof: return "proof";
    case RecordKind::Escrow: return "escrow";
    }
    return "?";
}

std::string_view to_string(EscrowState s) {
    switch (s) {
    case EscrowState::Open: return "OPEN";
    case EscrowState::Releasable: return "RELEASABLE";
    case EscrowState::Withdrawn: return "WITHDRAWN";
    case EscrowState::Refunded: return "REFUNDED";
    }
    return "?";
}

Digest Record::digest() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    w.str(origin);
    w.blob(payload);
    return sha256(w.bytes());
}

Bytes Block::encode() const {
    ByteWriter w;
    w.u64(height);
    w.digest(prev);
    w.u32(static_cast<std::uint32_t>(records.size()));
    for (const auto& r : records) {
        w.u8(static_cast<std::uint8_t>(r.kind));
        w.str(r.origin);
        w.blob(r.payload);
    }
    return std::move(w).take();
}

Digest Block::digest() const { return sha256(encode()); }

void HotStore::append(Block block) {
    const std::uint64_t expect = blocks_.empty() ? 0 : blocks_.back().height + 1;
    const Digest prev = blocks_.empty() ? Digest{} : blocks_.back().digest();
    if (block.height != expect || block.prev != prev)
        throw Error(ErrorKind::StateError, "block " + std::to_string(block.height) + " does not extend the chain");
    blocks_.push_back(std::move(block));
}

const Record& HotStore::record(std::uint64_t height, std::uint32_t index) const {
    if (height >= blocks_.size() || index >= blocks_[height].records.size())
        throw Error(ErrorKind::NotFound, "no record at " + std::to_string(height) + "/" + std::to_string(index));
    return blocks_[height].records[index];
}

bool HotStore::links_intact() const {
    Digest prev{};
    for (std::size_t h = 0; h < blocks_.size(); ++h) {
        if (blocks_[h].height != h || blocks_[h].prev != prev) return false;
        prev = blocks_[h].digest();
    }
    return true;
}

const Bytes* ColdStore::get(const std::string& device) const {
    auto it = data_.find(device);
    return it == data_.end() ? nullptr : &it->second;
}

Ledger::Ledger(std::vector<std::string> nodes, std::uint64_t modulus)
    : nodes_(std::move(nodes)), modulus_(modulus), hot_(nodes_.size()), cold_(nodes_.size()) {
    if (nodes_.empty()) throw Error(ErrorKind::ConfigError, "ledger needs at least one node");
    ByteWriter w;
    w.u64(modulus_);
    w.u32(static_cast<std::uint32_t>(nodes_.size()));
    for (const auto& n : nodes_) w.str(n);
    chain_tip_.records.push_back({RecordKind::Genesis, "", std::move(w).take()});
    for (auto& h : hot_) h.append(chain_tip_);
}

void Ledger::mint(const std::string& account, std::int64_t amount) {
    if (amount < 0) throw Error(ErrorKind::RangeError, "negative mint");
    balances_[account] += amount;
}

std::int64_t Ledger::balance(const std::string& account) const {
    auto it = balances_.find(account);
    return it == balances_.end() ? 0 : it->second;
}

EscrowAccount& Ledger::find(const std::string& session) {
    auto it = escrows_.find(session);
    if (it == escrows_.end()) throw Error(ErrorKind::UnknownSession, session);
    return it->second;
}

const EscrowAccount& Ledger::escrow(const std::string& session) const {
    auto it = escrows_.find(session);
    if (it == escrows_.end()) throw Error(ErrorKind::UnknownSession, session);
    return it->second;
}

void Ledger::log_escrow(const std::string& op, const EscrowAccount& e) {
    const std::string line = op + "|" + e.session + "|" + std::to_string(e.amount) + "|" + e.depositor + "|" +
                             e.beneficiary + "|" + std::string(to_string(e.state));
    queue(RecordKind::Escrow, "", Bytes(line.begin(), line.end()));
}

EscrowAccount Ledger::deposit(const std::string& session, const std::string& depositor,
                              const std::string& beneficiary, std::int64_t amount) {
    if (amount <= 0) throw Error(ErrorKind::RangeError, "deposit must be positive");
    if (escrows_.contains(session)) throw Error(ErrorKind::DuplicateSession, session);
    if (balance(depositor) < amount)
        throw Error(ErrorKind::InsufficientFunds, depositor + " holds " + std::to_string(balance(depositor)));
    balances_[depositor] -= amount;
    auto& e = escrows_[session] = {session, depositor, beneficiary, amount, EscrowState::Open, false};
    log_escrow("deposit", e);
    return e;
}

bool Ledger::verify_funds(const std::string& session, std::int64_t required) const {
    const auto& e = escrow(session);
    return e.state == EscrowState::Open && e.amount >= required;
}

void Ledger::mark_failed(const std::string& session) { find(session).failed = true; }

EscrowAccount Ledger::release(const std::string& session) {
    auto& e = find(session);
    if (e.state != EscrowState::Open || e.failed)
        throw Error(ErrorKind::StateError, "release from " + std::string(to_string(e.state)));
    e.state = EscrowState::Releasable;
    log_escrow("release", e);
    return e;
}

EscrowAccount Ledger::withdraw(const std::string& session, const std::string& caller) {
    auto& e = find(session);
    if (caller != e.beneficiary) throw Error(ErrorKind::Unauthorized, caller + " is not the beneficiary");
    if (e.state != EscrowState::Releasable)
        throw Error(ErrorKind::StateError, "withdraw from " + std::string(to_string(e.state)));
    e.state = EscrowState::Withdrawn;
    balances_[e.beneficiary] += e.amount;
    log_escrow("withdraw", e);
    return e;
}

EscrowAccount Ledger::refund(const std::string& session) {
    auto& e = find(session);
    if (e.state != EscrowState::Open || !e.failed)
        throw Error(ErrorKind::StateError, "refund from " + std::string(to_string(e.state)) +
                                               (e.failed ? "" : " (session not failed)"));
    e.state = EscrowState::Refunded;
    balances_[e.depositor] += e.amount;
    log_escrow("refund", e);
    return e;
}

void Ledger::register_contract(const std::string& node, const std::string& id, std::span<const std::uint8_t> body) {
    node_index(node);
    ByteWriter w;
    w.str(id);
    w.blob(body);
    queue(RecordKind::Contract, node, std::move(w).take());
}

Location Ledger::append_proof(const std::string& node, std::span<const std::uint8_t> proof) {
    node_index(node);
    try {
        fc::decode_bundle(proof, modulus_);
    } catch (const Error& e) {
        throw Error(ErrorKind::EncodingError, std::string("rejected proof bytes: ") + e.what());
    }
    return queue(RecordKind::Proof, node, Bytes(proof.begin(), proof.end()));
}

Bytes Ledger::read_proof(const std::string& node, std::uint64_t height, std::uint32_t index) const {
    const auto& rec = hot(node).record(height, index);
    if (rec.kind != RecordKind::Proof)
        throw Error(ErrorKind::NotFound, "record " + std::to_string(height) + "/" + std::to_string(index) +
                                             " is not a proof");
    return rec.payload;
}

Location Ledger::queue(RecordKind kind, const std::string& origin, Bytes payload) {
    const Location at{chain_tip_.height + 1, static_cast<std::uint32_t>(pending_.size())};
    pending_.push_back({kind, origin, std::move(payload)});
    return at;
}

bool Ledger::seal() {
    if (pending_.empty()) return false;
    Block next;
    next.height = chain_tip_.height + 1;
    next.prev = chain_tip_.digest();
    next.records = std::move(pending_);
    pending_.clear();
    for (auto& h : hot_) h.append(next);
    chain_tip_ = std::move(next);
    return true;
}

std::size_t Ledger::node_index(const std::string& node) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), node);
    if (it == nodes_.end()) throw Error(ErrorKind::NotFound, "unknown node " + node);
    return static_cast<std::size_t>(it - nodes_.begin());
}

const HotStore& Ledger::hot(const std::string& node) const { return hot_[node_index(node)]; }
ColdStore& Ledger::cold(const std::string& node) { return cold_[node_index(node)]; }
const ColdStore& Ledger::cold(const std::string& node) const { return cold_[node_index(node)]; }

std::int64_t Ledger::total_tokens() const {
    std::int64_t sum = 0;
    for (const auto& [_, b] : balances_) sum += b;
    for (const auto& [_, e] : escrows_)
        if (e.state == EscrowState::Open || e.state == EscrowState::Releasable) sum += e.amount;
    return sum;
}

std::string Ledger::dump_records() const {
    std::string out;
    for (const auto& b : hot(nodes_.front()).blocks())
        for (std::size_t i = 0; i < b.records.size(); ++i)
            out += std::to_string(b.height) + "|" + std::to_string(i) + "|" + std::string(to_string(b.records[i].kind)) +
                   "|" + to_hex(b.records[i].digest()) + "\n";
    return out;
}

std::string Ledger::escrow_table() const {
    std::string out;
    for (const auto& [id, e] : escrows_)
        out += id + "|" + std::string(to_string(e.state)) + "|" + std::to_string(e.amount) + "|" + e.depositor + "|" +
               e.beneficiary + "\n";
    return out;
}

} // namespace devproof::ledger
