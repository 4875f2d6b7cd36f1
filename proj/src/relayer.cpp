#include "devproof/relayer.hpp"

#include <deque>
#include <map>
#include <set>

#include "devproof/hash.hpp"

namespace devproof::relayer {

std::string_view to_string(State s) {
    switch (s) {
    case State::Init: return "INIT";
    case State::Funded: return "FUNDED";
    case State::ProofSubmitted: return "PROOF_SUBMITTED";
    case State::FundsVerified: return "FUNDS_VERIFIED";
    case State::DataAtRelayer: return "DATA_AT_RELAYER";
    case State::DataDelivered: return "DATA_DELIVERED";
    case State::ProofVerified: return "PROOF_VERIFIED";
    case State::Acked: return "ACKED";
    case State::ReleaseAuthorized: return "RELEASE_AUTHORIZED";
    case State::FundsReleased: return "FUNDS_RELEASED";
    case State::Withdrawn: return "WITHDRAWN";
    case State::Failed: return "FAILED";
    }
    return "?";
}

std::string_view to_string(Kind k) {
    switch (k) {
    case Kind::Deposited: return "Deposited";
    case Kind::NewDataNotice: return "NewDataNotice";
    case Kind::ProofSubmitted: return "ProofSubmitted";
    case Kind::FundsQuery: return "FundsQuery";
    case Kind::FundsOk: return "FundsOk";
    case Kind::FundsShort: return "FundsShort";
    case Kind::DataRequest: return "DataRequest";
    case Kind::DataTransfer: return "DataTransfer";
    case Kind::DataDelivery: return "DataDelivery";
    case Kind::VerifyResult: return "VerifyResult";
    case Kind::Ack: return "Ack";
    case Kind::ReceivedNotice: return "ReceivedNotice";
    case Kind::ReleaseCmd: return "ReleaseCmd";
    case Kind::ReleaseRequest: return "ReleaseRequest";
    case Kind::ReleaseDone: return "ReleaseDone";
    case Kind::WithdrawDone: return "WithdrawDone";
    case Kind::RefundRequest: return "RefundRequest";
    case Kind::Timeout: return "Timeout";
    }
    return "?";
}

int workflow_step(Kind k) {
    switch (k) {
    case Kind::Deposited: return 1;
    case Kind::NewDataNotice:
    case Kind::ProofSubmitted: return 2;
    case Kind::FundsQuery:
    case Kind::FundsOk:
    case Kind::FundsShort: return 3;
    case Kind::DataRequest:
    case Kind::DataTransfer: return 4;
    case Kind::DataDelivery: return 5;
    case Kind::VerifyResult: return 6;
    case Kind::Ack: return 7;
    case Kind::ReceivedNotice: return 8;
    case Kind::ReleaseCmd: return 9;
    case Kind::ReleaseRequest:
    case Kind::ReleaseDone: return 10;
    case Kind::WithdrawDone: return 11;
    case Kind::RefundRequest:
    case Kind::Timeout: return 0;
    }
    return 0;
}

std::string Message::label() const {
    std::string out(to_string(kind));
    if (kind == Kind::VerifyResult) out += accept ? "(accept)" : "(reject:" + note + ")";
    return out;
}

std::string Session::label() const {
    std::string out(to_string(state));
    if (state == State::Failed) out += "(" + failure + ")";
    return out;
}

Message stamp(Message m) {
    if (m.digest == Digest{}) {
        ByteWriter w;
        w.str(m.session);
        w.str(to_string(m.kind));
        w.str(m.sender);
        w.str(m.recipient);
        w.u8(m.accept ? 1 : 0);
        w.str(m.note);
        m.digest = sha256(w.bytes());
    }
    return m;
}

namespace {

Message make(const Session& s, Kind k, const std::string& from, const std::string& to) {
    Message m;
    m.kind = k;
    m.session = s.id;
    m.sender = from;
    m.recipient = to;
    return m;
}

[[noreturn]] void illegal(const Session& s, const Message& m) {
    throw Error(ErrorKind::ProtocolViolation,
                "session " + s.id + ": " + m.label() + " not allowed in " + s.label());
}

void fail(Step& st, std::string reason) {
    st.session.state = State::Failed;
    st.session.failure = std::move(reason);
    st.emitted.push_back(make(st.session, Kind::RefundRequest, kRelayer, kEscrow));
}

} // namespace

Step step_session(const Session& s, const Message& m) {
    Step st{s, {}};
    Session& n = st.session;
    const State from = s.state;
    auto go = [&](State to) { n.state = to; };

    if (m.kind == Kind::Timeout) {
        if (s.terminal()) illegal(s, m);
        fail(st, "timeout");
    } else {
        switch (from) {
        case State::Init:
            if (m.kind != Kind::Deposited) illegal(s, m);
            go(State::Funded);
            break;
        case State::Funded:
            if (m.kind == Kind::NewDataNotice) break;
            if (m.kind != Kind::ProofSubmitted) illegal(s, m);
            go(State::ProofSubmitted);
            {
                auto q = make(n, Kind::FundsQuery, kRelayer, kEscrow);
                q.proof_at = m.proof_at;
                q.digest = m.digest;
                st.emitted.push_back(q);
            }
            break;
        case State::ProofSubmitted:
            if (m.kind == Kind::FundsQuery) break;
            if (m.kind == Kind::FundsOk) {
                go(State::FundsVerified);
                st.emitted.push_back(make(n, Kind::DataRequest, kRelayer, s.node_x));
            } else if (m.kind == Kind::FundsShort) {
                fail(st, "funds");
            } else {
                illegal(s, m);
            }
            break;
        case State::FundsVerified:
            if (m.kind == Kind::DataRequest) break;
            if (m.kind != Kind::DataTransfer) illegal(s, m);
            go(State::DataAtRelayer);
            {
                auto d = make(n, Kind::DataDelivery, kRelayer, s.node_y);
                d.digest = m.digest;
                d.proof_at = m.proof_at;
                st.emitted.push_back(d);
            }
            break;
        case State::DataAtRelayer:
            if (m.kind != Kind::DataDelivery) illegal(s, m);
            go(State::DataDelivered);
            break;
        case State::DataDelivered:
            if (m.kind != Kind::VerifyResult) illegal(s, m);
            if (m.accept) {
                go(State::ProofVerified);
                n.passed_verified = true;
                st.emitted.push_back(make(n, Kind::Ack, s.node_y, kRelayer));
            } else {
                fail(st, m.note.empty() ? "proof" : m.note);
            }
            break;
        case State::ProofVerified:
            if (m.kind != Kind::Ack) illegal(s, m);
            go(State::Acked);
            n.passed_acked = true;
            st.emitted.push_back(make(n, Kind::ReceivedNotice, kRelayer, s.node_x));
            break;
        case State::Acked:
        case State::ReleaseAuthorized:
        case State::FundsReleased:
            if (m.kind == Kind::ReceivedNotice && !s.notice_seen) {
                n.notice_seen = true;
            } else if (from == State::Acked && m.kind == Kind::ReleaseCmd) {
                go(State::ReleaseAuthorized);
                st.emitted.push_back(make(n, Kind::ReleaseRequest, kRelayer, kEscrow));
            } else if (from == State::ReleaseAuthorized && m.kind == Kind::ReleaseRequest) {
            } else if (from == State::ReleaseAuthorized && m.kind == Kind::ReleaseDone) {
                go(State::FundsReleased);
            } else if (from == State::FundsReleased && m.kind == Kind::WithdrawDone) {
                go(State::Withdrawn);
            } else {
                illegal(s, m);
            }
            break;
        case State::Withdrawn:
            illegal(s, m);
        case State::Failed:
            if (m.kind != Kind::RefundRequest || s.refund_seen) illegal(s, m);
            n.refund_seen = true;
            break;
        }
    }
    if (n.state != from) n.history.push_back(n.state);
    return st;
}

Effects deliver(Session& s, Actors& actors, ledger::Ledger& ledger, const Message& m, const Hooks& hooks) {
    Effects fx;
    auto send = [&](Message msg, std::uint64_t delay = 0) { fx.out.push_back({stamp(std::move(msg)), delay}); };

    bool accepted = false;
    try {
        auto st = step_session(s, m);
        s = std::move(st.session);
        accepted = true;
        for (auto& e : st.emitted) {
            const bool ack = e.kind == Kind::Ack;
            send(std::move(e));
            // Y finishes processing the data after acknowledging it
            if (ack) send(make(s, Kind::ReleaseCmd, s.node_y, kRelayer), hooks.release_delay);
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ProtocolViolation) throw;
        fx.violation = e.what();
    }

    switch (m.kind) {
    case Kind::Deposited:
        if (accepted && !actors.data_produced && hooks.produce) {
            actors.data_produced = true;
            send(hooks.produce(s));
        }
        break;
    case Kind::NewDataNotice:
        if (hooks.submit)
            if (auto r = hooks.submit(s, m)) send(std::move(*r));
        break;
    case Kind::FundsQuery: {
        bool ok = false;
        try {
            ok = ledger.verify_funds(s.id, s.amount);
        } catch (const Error& e) {
            fx.notes.push_back(e.what());
        }
        send(make(s, ok ? Kind::FundsOk : Kind::FundsShort, kEscrow, kRelayer));
        break;
    }
    case Kind::DataRequest:
        if (hooks.transfer) send(hooks.transfer(s));
        break;
    case Kind::DataDelivery:
        if (hooks.evaluate) send(hooks.evaluate(s, m));
        break;
    case Kind::ReceivedNotice:
        actors.x_notified = true;
        break;
    case Kind::ReleaseRequest:
        try {
            ledger.release(s.id);
            send(make(s, Kind::ReleaseDone, kEscrow, kRelayer));
        } catch (const Error& e) {
            fx.notes.push_back(e.what());
        }
        break;
    case Kind::RefundRequest:
        if (ledger.has_escrow(s.id) && ledger.escrow(s.id).state == ledger::EscrowState::Releasable) {
            actors.payout_due = true;
            break;
        }
        try {
            ledger.mark_failed(s.id);
            ledger.refund(s.id);
        } catch (const Error& e) {
            fx.notes.push_back(e.what());
        }
        break;
    default:
        break;
    }

    // A collects once its node has heard the data arrived and the escrow is releasable
    if ((actors.x_notified || actors.payout_due) && !actors.withdrawn && ledger.has_escrow(s.id) &&
        ledger.escrow(s.id).state == ledger::EscrowState::Releasable) {
        ledger.withdraw(s.id, s.device_a);
        actors.withdrawn = true;
        send(make(s, Kind::WithdrawDone, kEscrow, kRelayer));
    }
    return fx;
}

namespace {

using Pair = std::pair<std::string, std::string>;

struct ModelState {
    Session session;
    Actors actors;
    ledger::Ledger ledger{{"node-x", "node-y"}};
    std::map<Pair, std::deque<Message>> queues;
    std::int64_t deposit = 0;

    std::string key() const {
        std::string k(to_string(session.state));
        k += "|" + session.failure;
        for (bool b : {session.passed_verified, session.passed_acked, session.notice_seen, session.refund_seen,
                       actors.data_produced, actors.x_notified, actors.payout_due, actors.withdrawn})
            k += b ? '1' : '0';
        k += "|" + std::to_string(deposit);
        if (ledger.has_escrow(session.id)) {
            const auto& e = ledger.escrow(session.id);
            k += "|" + std::string(ledger::to_string(e.state)) + (e.failed ? "!" : "");
        }
        for (const auto& [who, bal] : ledger.balances()) k += "|" + who + "=" + std::to_string(bal);
        for (const auto& [pair, q] : queues) {
            if (q.empty()) continue;
            k += "|" + pair.first + ">" + pair.second + ":";
            for (const auto& m : q) k += m.label() + ",";
        }
        return k;
    }

    bool quiet() const {
        for (const auto& [_, q] : queues)
            if (!q.empty()) return false;
        return true;
    }
};

constexpr std::int64_t kStartBalance = 200;

bool ordered(const std::vector<State>& history) {
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i] == State::Failed) return i + 1 == history.size();
        if (static_cast<int>(history[i]) != static_cast<int>(history[i - 1]) + 1) return false;
    }
    return true;
}

} // namespace

ModelReport model_check(const ModelOptions& options) {
    ModelReport report;

    Hooks hooks;
    bool verdict = true;
    hooks.produce = [](const Session& s) { return make(s, Kind::NewDataNotice, s.device_a, s.node_x); };
    hooks.submit = [](const Session& s, const Message&) -> std::optional<Message> {
        auto m = make(s, Kind::ProofSubmitted, s.node_x, kRelayer);
        m.proof_at = {1, 0};
        return m;
    };
    hooks.transfer = [](const Session& s) { return make(s, Kind::DataTransfer, s.node_x, kRelayer); };
    hooks.evaluate = [&verdict](const Session& s, const Message&) {
        auto m = make(s, Kind::VerifyResult, s.node_y, kRelayer);
        m.accept = verdict;
        if (!verdict) m.note = "proof";
        return m;
    };

    std::deque<ModelState> frontier;
    std::set<std::string> seen;
    std::int64_t total = 0;

    for (auto d : options.deposits) {
        ModelState st;
        st.session.id = "s";
        st.session.device_a = "A";
        st.session.device_b = "B";
        st.session.node_x = "node-x";
        st.session.node_y = "node-y";
        st.session.amount = options.amount;
        st.deposit = d;
        st.ledger.mint("A", 0);
        st.ledger.mint("B", kStartBalance);
        st.ledger.deposit("s", "B", "A", d);
        st.queues[{kEscrow, kRelayer}].push_back(stamp(make(st.session, Kind::Deposited, kEscrow, kRelayer)));
        total = st.ledger.total_tokens();
        if (seen.insert(st.key()).second) frontier.push_back(std::move(st));
    }

    auto check = [&](const ModelState& st, const std::string& via) {
        const auto& s = st.session;
        auto err = [&](const std::string& what) { report.errors.push_back(what + " after " + via + " in " + st.key()); };
        if (st.ledger.total_tokens() != total) err("tokens not conserved");
        if (s.state == State::Withdrawn && !(s.passed_verified && s.passed_acked)) err("WITHDRAWN without verification");
        const auto& e = st.ledger.escrow(s.id);
        if (e.state == ledger::EscrowState::Withdrawn && !(s.passed_verified && s.passed_acked))
            err("A paid without verification");
        if (!ordered(s.history)) err("states out of order");
    };

    while (!frontier.empty()) {
        ModelState cur = std::move(frontier.front());
        frontier.pop_front();
        ++report.states;
        if (report.states > options.state_limit) {
            report.errors.push_back("state limit exceeded");
            break;
        }

        struct Choice {
            std::optional<Pair> from;
            bool verdict = true;
        };
        std::vector<Choice> choices;
        for (const auto& [pair, q] : cur.queues) {
            if (q.empty()) continue;
            if (q.front().kind == Kind::DataDelivery) {
                choices.push_back({pair, true});
                choices.push_back({pair, false});
            } else {
                choices.push_back({pair, true});
            }
        }
        if (options.timeouts && !cur.session.terminal()) choices.push_back({std::nullopt, true});

        if (choices.empty()) {
            ++report.terminal_states;
            const auto& s = cur.session;
            const auto& e = cur.ledger.escrow(s.id);
            if (!s.terminal()) {
                report.errors.push_back("stuck in " + s.label());
            } else {
                s.state == State::Withdrawn ? ++report.withdrawn_paths : ++report.failed_paths;
                const bool paid = e.state == ledger::EscrowState::Withdrawn;
                const bool refunded = e.state == ledger::EscrowState::Refunded;
                if (paid == refunded) report.errors.push_back("escrow settled " + std::string(ledger::to_string(e.state)));
                if (cur.ledger.balance("A") != (paid ? cur.deposit : 0) ||
                    cur.ledger.balance("B") != kStartBalance - (paid ? cur.deposit : 0))
                    report.errors.push_back("funds moved more than once in " + cur.key());
            }
            continue;
        }

        for (const auto& c : choices) {
            ModelState next = cur;
            Message m;
            if (c.from) {
                m = next.queues[*c.from].front();
                next.queues[*c.from].pop_front();
            } else {
                m = stamp(make(next.session, Kind::Timeout, kClock, kRelayer));
            }
            verdict = c.verdict;
            const auto fx = deliver(next.session, next.actors, next.ledger, m, hooks);
            if (fx.violation) ++report.violations_seen;
            for (const auto& o : fx.out) next.queues[{o.msg.sender, o.msg.recipient}].push_back(o.msg);
            ++report.transitions;
            check(next, m.label());
            if (seen.insert(next.key()).second) frontier.push_back(std::move(next));
        }
    }
    return report;
}

} // namespace devproof::relayer
