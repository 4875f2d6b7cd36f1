#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "devproof/ledger.hpp"

namespace devproof::relayer {

enum class State {
    Init,
    Funded,
    ProofSubmitted,
    FundsVerified,
    DataAtRelayer,
    DataDelivered,
    ProofVerified,
    Acked,
    ReleaseAuthorized,
    FundsReleased,
    Withdrawn,
    Failed,
};

enum class Kind {
    Deposited,
    NewDataNotice,
    ProofSubmitted,
    FundsQuery,
    FundsOk,
    FundsShort,
    DataRequest,
    DataTransfer,
    DataDelivery,
    VerifyResult,
    Ack,
    ReceivedNotice,
    ReleaseCmd,
    ReleaseRequest,
    ReleaseDone,
    WithdrawDone,
    RefundRequest,
    Timeout,
};

std::string_view to_string(State s);
std::string_view to_string(Kind k);
/// Which of the eleven workflow steps a message belongs to (0 for failure handling).
int workflow_step(Kind k);

inline const std::string kRelayer = "relayer";
inline const std::string kEscrow = "escrow";
inline const std::string kClock = "clock";

struct Message {
    Kind kind = Kind::Timeout;
    std::string session;
    std::string sender;
    std::string recipient;
    Digest digest{};
    bool accept = true;      // VerifyResult only
    std::string note;        // VerifyResult reject reason
    ledger::Location proof_at{};

    /// Kind name, with the verdict for VerifyResult.
    std::string label() const;
};

struct Session {
    std::string id;
    std::string device_a; // producer, paid on success
    std::string device_b; // consumer, funds the escrow
    std::string node_x;
    std::string node_y;
    std::string contract_x;
    std::string contract_y;
    std::int64_t amount = 0;
    std::uint64_t timeout = 50;

    State state = State::Init;
    std::string failure;
    bool passed_verified = false;
    bool passed_acked = false;
    bool notice_seen = false;
    bool refund_seen = false;
    std::vector<State> history{State::Init};

    bool terminal() const { return state == State::Withdrawn || state == State::Failed; }
    /// "WITHDRAWN", "FAILED(proof)", ...
    std::string label() const;
};

struct Step {
    Session session;
    std::vector<Message> emitted;
};

/// The transition table. Throws ProtocolViolation for an illegal (state, kind)
/// pair; the caller's session is untouched in that case.
Step step_session(const Session& s, const Message& m);

/// Per-session state held by the devices, contracts and escrow.
struct Actors {
    bool data_produced = false;
    bool x_notified = false;
    bool payout_due = false; // refund asked for after B already released
    bool withdrawn = false;
};

struct Outbound {
    Message msg;
    std::uint64_t delay = 0; // extra ticks beyond normal latency
};

struct Effects {
    std::vector<Outbound> out;
    std::optional<std::string> violation;
    std::vector<std::string> notes;
};

/// Application-side behavior the protocol defers to.
struct Hooks {
    std::function<Message(const Session&)> produce;                   // A -> X NewDataNotice
    std::function<std::optional<Message>(const Session&, const Message&)> submit; // X -> relayer ProofSubmitted
    std::function<Message(const Session&)> transfer;                  // X -> relayer DataTransfer
    std::function<Message(const Session&, const Message&)> evaluate;  // Y -> relayer VerifyResult
    std::uint64_t release_delay = 2;
};

/// Delivers one message: advances the session monitor, then lets the
/// recipient react. Ledger effects (funds check, release, refund, withdraw)
/// happen here.
Effects deliver(Session& s, Actors& actors, ledger::Ledger& ledger, const Message& m, const Hooks& hooks);

/// Fills in a digest over the header fields when none was set.
Message stamp(Message m);

struct ModelReport {
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t terminal_states = 0;
    std::size_t withdrawn_paths = 0;
    std::size_t failed_paths = 0;
    std::size_t violations_seen = 0;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

struct ModelOptions {
    std::int64_t amount = 100;
    std::vector<std::int64_t> deposits{100, 50};
    bool timeouts = true;
    std::size_t state_limit = 10000;
};

/// Breadth-first search over every interleaving of in-flight messages (FIFO
/// per sender/recipient pair), contract verdicts and timeouts for one session.
ModelReport model_check(const ModelOptions& options = {});

} // namespace devproof::relayer
