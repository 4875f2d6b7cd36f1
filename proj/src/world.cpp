#include "devproof/world.hpp"

#include <chrono>
#include <queue>
#include <random>
#include <set>

#include "devproof/hash.hpp"

namespace devproof::world {

using relayer::Kind;
using relayer::Message;

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t micros_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0).count();
}

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw Error(ErrorKind::ConfigError, field + ": " + why);
}

struct Event {
    std::uint64_t tick = 0;
    std::uint64_t seq = 0;
    bool timer = false;
    bool start = false;
    std::size_t session = 0;
    std::uint64_t epoch = 0;
    Message msg;

    bool operator>(const Event& o) const { return tick != o.tick ? tick > o.tick : seq > o.seq; }
};

struct Runtime {
    const SessionSetup* setup = nullptr;
    relayer::Session session;
    relayer::Actors actors;
    device::DataBundle bundle;
    ledger::Location proof_at{};
    std::uint64_t epoch = 0;
    Clock::time_point started{};
    SessionOutcome outcome;
};

Bytes decision_bytes(const contract::Decision& d) {
    ByteWriter w;
    w.u8(d.forwarded ? 1 : 0);
    w.str(d.reason);
    w.str(d.next_hop);
    for (const auto& [k, v] : d.outputs) {
        w.str(k);
        w.str(v);
    }
    return std::move(w).take();
}

class Simulation {
public:
    explicit Simulation(const WorldConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        result_.ledger = ledger::Ledger(cfg.nodes, cfg.modulus);
        auto& led = result_.ledger;
        for (const auto& [who, amount] : cfg.balances) led.mint(who, amount);
        for (const auto& [id, dev] : cfg.devices) {
            led.mint(id, 0);
            const auto& keys = dev.identity.keys;
            keystore_[keys.vk.digest] = keys.vk;
            if (dev.tamper == device::Tamper::RogueKey) {
                const auto rogue = fc::setup(keys.pp.lambda + 1, keys.pk.instance);
                keystore_[rogue.vk.digest] = rogue.vk;
            }
        }
        for (const auto& [digest, vk] : keystore_) led.register_contract(cfg.nodes.front(), "vk:" + to_hex(digest),
                                                                         fc::encode_verification_key(vk));
        for (const auto& [id, c] : cfg.contracts) {
            ByteWriter w;
            w.str(c.spec.required_device_type);
            w.str(c.spec.next_hop);
            w.u32(static_cast<std::uint32_t>(c.spec.guards.size()));
            for (const auto& g : c.spec.guards) {
                w.str(g.name);
                w.str(g.field);
                w.str(contract::to_string(g.predicate));
                w.str(g.constant);
            }
            led.register_contract(c.node, id, w.bytes());
        }
        led.seal();

        for (std::size_t i = 0; i < cfg.sessions.size(); ++i) {
            const auto& ss = cfg.sessions[i];
            Runtime rt;
            rt.setup = &ss;
            auto& s = rt.session;
            s.id = ss.id;
            s.device_a = ss.device_a;
            s.device_b = ss.device_b;
            s.node_x = cfg.devices.at(ss.device_a).node;
            s.node_y = cfg.devices.at(ss.device_b).node;
            s.contract_x = ss.contract_x;
            s.contract_y = ss.contract_y;
            s.amount = ss.amount;
            s.timeout = cfg.timeout;
            runtimes_.push_back(std::move(rt));
            Event e;
            e.tick = ss.start;
            e.start = true;
            e.session = i;
            push(std::move(e));
        }
    }

    RunResult run() {
        std::uint64_t now = 0;
        while (!events_.empty()) {
            Event ev = events_.top();
            events_.pop();
            if (ev.tick != now) {
                seal();
                now = ev.tick;
            }
            now_ = now;
            auto& rt = runtimes_[ev.session];
            if (ev.start) {
                begin(ev.session);
            } else if (ev.timer) {
                if (ev.epoch == rt.epoch && !rt.session.terminal()) {
                    Message t;
                    t.kind = Kind::Timeout;
                    t.session = rt.session.id;
                    t.sender = relayer::kClock;
                    t.recipient = relayer::kRelayer;
                    handle(ev.session, relayer::stamp(t));
                }
            } else {
                handle(ev.session, ev.msg);
            }
        }
        seal();
        result_.ticks = now_;
        for (auto& rt : runtimes_) {
            rt.outcome.session = rt.session;
            result_.sessions.push_back(std::move(rt.outcome));
        }
        return std::move(result_);
    }

private:
    void push(Event e) {
        e.seq = seq_++;
        events_.push(std::move(e));
    }

    void seal() {
        const auto t0 = Clock::now();
        if (result_.ledger.seal() && proofs_pending_) result_.metrics.add("confirm", micros_since(t0));
        proofs_pending_ = false;
    }

    void arm(std::size_t idx) {
        auto& rt = runtimes_[idx];
        ++rt.epoch;
        if (rt.session.terminal()) return;
        Event e;
        e.tick = now_ + rt.session.timeout;
        e.timer = true;
        e.session = idx;
        e.epoch = rt.epoch;
        push(std::move(e));
    }

    void send(std::size_t idx, const Message& m, std::uint64_t extra) {
        const auto& f = cfg_.faults;
        const bool on_chain = m.sender == relayer::kEscrow || m.recipient == relayer::kEscrow;
        if (!on_chain && f.drop_per_mille > 0 && rng_() % 1000 < f.drop_per_mille) {
            log(runtimes_[idx], "DROPPED@" + runtimes_[idx].session.label(), m);
            return;
        }
        std::uint64_t delay = 1 + extra;
        if (f.max_delay > 0) delay += rng_() % (f.max_delay + 1);
        auto& last = fifo_[{m.sender, m.recipient}];
        const auto at = std::max(now_ + delay, last);
        last = at;
        Event e;
        e.tick = at;
        e.session = idx;
        e.msg = m;
        push(std::move(e));
    }

    void log(const Runtime& rt, const std::string& state, const Message& m) {
        result_.transcript.push_back(std::to_string(now_) + "|" + rt.session.id + "|" + state + "|" + m.label() + "|" +
                                     m.sender + ">" + m.recipient + "|" + to_hex(m.digest));
    }

    void begin(std::size_t idx) {
        auto& rt = runtimes_[idx];
        rt.started = Clock::now();
        const auto& ss = *rt.setup;
        arm(idx);
        try {
            result_.ledger.deposit(ss.id, ss.device_b, ss.device_a, ss.deposit);
        } catch (const Error& e) {
            rt.outcome.violations.push_back(e.what());
            return;
        }
        Message m;
        m.kind = Kind::Deposited;
        m.session = ss.id;
        m.sender = relayer::kEscrow;
        m.recipient = relayer::kRelayer;
        send(idx, relayer::stamp(m), 0);
    }

    void handle(std::size_t idx, const Message& m) {
        auto& rt = runtimes_[idx];
        const auto before = rt.session.state;
        const auto hooks = hooks_for(idx);
        const auto fx = relayer::deliver(rt.session, rt.actors, result_.ledger, m, hooks);
        if (fx.violation) rt.outcome.violations.push_back(*fx.violation);
        for (const auto& n : fx.notes) rt.outcome.violations.push_back(n);
        log(rt, fx.violation ? "VIOLATION@" + rt.session.label() : rt.session.label(), m);
        for (const auto& o : fx.out) send(idx, o.msg, o.delay);
        if (rt.session.state != before) {
            arm(idx);
            if (rt.session.terminal()) {
                rt.outcome.finished_at = now_;
                result_.metrics.add("session", micros_since(rt.started));
            }
        }
    }

    relayer::Hooks hooks_for(std::size_t idx) {
        relayer::Hooks h;
        h.release_delay = cfg_.release_delay;
        auto& rt = runtimes_[idx];
        auto& led = result_.ledger;
        auto& metrics = result_.metrics;

        h.produce = [&](const relayer::Session& s) {
            const auto& dev = cfg_.devices.at(s.device_a);
            std::vector<field::Fp> inputs;
            for (const auto& r : dev.readings)
                inputs.push_back(device::encode_reading(r, dev.scale, cfg_.modulus));
            const auto t0 = Clock::now();
            rt.bundle = device::emit_bundle(dev.identity, inputs, dev.metadata, dev.tamper);
            metrics.add("prove", micros_since(t0));
            Message m;
            m.kind = Kind::NewDataNotice;
            m.session = s.id;
            m.sender = s.device_a;
            m.recipient = s.node_x;
            m.digest = sha256(device::encode_bundle(rt.bundle));
            return m;
        };
        h.submit = [&](const relayer::Session& s, const Message&) -> std::optional<Message> {
            const auto t0 = Clock::now();
            try {
                rt.proof_at = led.append_proof(s.node_x, rt.bundle.proof);
            } catch (const Error& e) {
                rt.outcome.violations.push_back(e.what());
                return std::nullopt;
            }
            metrics.add("write", micros_since(t0));
            proofs_pending_ = true;
            led.cold(s.node_x).put(s.device_a, device::encode_payload(rt.bundle));
            Message m;
            m.kind = Kind::ProofSubmitted;
            m.session = s.id;
            m.sender = s.node_x;
            m.recipient = relayer::kRelayer;
            m.digest = sha256(rt.bundle.proof);
            m.proof_at = rt.proof_at;
            return m;
        };
        h.transfer = [&](const relayer::Session& s) {
            Message m;
            m.kind = Kind::DataTransfer;
            m.session = s.id;
            m.sender = s.node_x;
            m.recipient = relayer::kRelayer;
            if (const auto* payload = led.cold(s.node_x).get(s.device_a)) m.digest = sha256(*payload);
            m.proof_at = rt.proof_at;
            return m;
        };
        h.evaluate = [&](const relayer::Session& s, const Message& delivery) {
            Message m;
            m.kind = Kind::VerifyResult;
            m.session = s.id;
            m.sender = s.node_y;
            m.recipient = relayer::kRelayer;

            contract::Decision d;
            auto received = rt.bundle;
            try {
                const auto t0 = Clock::now();
                received.proof = led.read_proof(s.node_y, delivery.proof_at.height, delivery.proof_at.index);
                metrics.add("read", micros_since(t0));
                auto key = keystore_.find(received.vk_digest);
                if (key == keystore_.end()) {
                    d = contract::Decision::reject("proof");
                } else {
                    const auto t1 = Clock::now();
                    d = contract::evaluate_contract(cfg_.contracts.at(s.contract_y).spec, cfg_.registry, received,
                                                    key->second);
                    metrics.add("verify", micros_since(t1));
                }
            } catch (const Error& e) {
                rt.outcome.violations.push_back(e.what());
                d = contract::Decision::reject("proof-unavailable");
            }
            d.forwarded ? ++metrics.accepts : ++metrics.rejects;
            if (d.forwarded) {
                rt.outcome.forwarded = d.outputs;
                led.cold(s.node_y).put(s.device_a, device::encode_payload(received));
            }
            m.accept = d.forwarded;
            m.note = d.reason;
            m.digest = sha256(decision_bytes(d));
            return m;
        };
        return h;
    }

    const WorldConfig& cfg_;
    std::mt19937_64 rng_;
    RunResult result_;
    std::map<Digest, fc::VerificationKey> keystore_;
    std::vector<Runtime> runtimes_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::map<std::pair<std::string, std::string>, std::uint64_t> fifo_;
    std::uint64_t seq_ = 0;
    std::uint64_t now_ = 0;
    bool proofs_pending_ = false;
};

} // namespace

std::string RunResult::transcript_text() const {
    std::string out;
    for (const auto& line : transcript) out += line + "\n";
    return out;
}

std::string RunResult::sessions_text(const std::vector<SessionSetup>& setups) const {
    std::string out;
    for (std::size_t i = 0; i < sessions.size(); ++i)
        out += sessions[i].session.id + "|" + sessions[i].session.label() + "|" +
               (i < setups.size() ? setups[i].expect : "") + "\n";
    return out;
}

void validate(const WorldConfig& cfg) {
    if (cfg.nodes.empty()) bad("nodes", "at least one node is required");
    const std::set<std::string> nodes(cfg.nodes.begin(), cfg.nodes.end());
    if (nodes.size() != cfg.nodes.size()) bad("nodes", "duplicate node id");

    for (const auto& [id, dev] : cfg.devices) {
        const std::string at = "devices." + id;
        if (!nodes.contains(dev.node)) bad(at + ".node", "unknown node '" + dev.node + "'");
        if (dev.identity.keys.pp.modulus != cfg.modulus) bad(at, "keys use a different modulus");
        if (dev.readings.size() != dev.identity.firmware.num_inputs)
            bad(at + ".readings", "firmware takes " + std::to_string(dev.identity.firmware.num_inputs) + " inputs");
    }
    for (const auto& [id, c] : cfg.contracts) {
        if (!nodes.contains(c.node)) bad("contracts." + id + ".node", "unknown node '" + c.node + "'");
        contract::validate(c.spec);
    }
    for (const auto& [type, digests] : cfg.registry)
        if (digests.empty()) bad("registry." + type, "no authorized keys");

    std::set<std::string> ids;
    for (std::size_t i = 0; i < cfg.sessions.size(); ++i) {
        const auto& s = cfg.sessions[i];
        const std::string at = "sessions[" + std::to_string(i) + "]";
        if (s.id.empty() || !ids.insert(s.id).second) bad(at + ".id", "missing or duplicate");
        auto a = cfg.devices.find(s.device_a);
        auto b = cfg.devices.find(s.device_b);
        if (a == cfg.devices.end()) bad(at + ".a", "unknown device '" + s.device_a + "'");
        if (b == cfg.devices.end()) bad(at + ".b", "unknown device '" + s.device_b + "'");
        auto cx = cfg.contracts.find(s.contract_x);
        auto cy = cfg.contracts.find(s.contract_y);
        if (cx == cfg.contracts.end()) bad(at + ".contract_x", "unknown contract '" + s.contract_x + "'");
        if (cy == cfg.contracts.end()) bad(at + ".contract_y", "unknown contract '" + s.contract_y + "'");
        if (cx->second.node != a->second.node) bad(at + ".contract_x", "not deployed on the producer's node");
        if (cy->second.node != b->second.node) bad(at + ".contract_y", "not deployed on the consumer's node");
        if (s.amount <= 0) bad(at + ".amount", "must be positive");
        if (s.deposit <= 0) bad(at + ".deposit", "must be positive");
    }
}

RunResult run(const WorldConfig& cfg) {
    validate(cfg);
    Simulation sim(cfg);
    return sim.run();
}

} // namespace devproof::world
