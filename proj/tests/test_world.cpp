#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "devproof/error.hpp"
#include "devproof/scenario.hpp"
#include "devproof/world.hpp"

using namespace devproof;

namespace {

const std::filesystem::path kScenarios = std::filesystem::path(DEVPROOF_SOURCE_DIR) / "scenarios";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

world::WorldConfig load(const char* name, std::optional<std::uint64_t> seed = std::nullopt) {
    return scenario::load(kScenarios / name, seed);
}

std::string config_error(const std::string& text) {
    try {
        scenario::parse(text, kScenarios);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) return e.what();
        return "wrong kind: " + std::string(e.what());
    }
    return "accepted";
}

std::int64_t initial_tokens(const world::WorldConfig& cfg) {
    std::int64_t t = 0;
    for (const auto& [who, v] : cfg.balances) t += v;
    return t;
}

} // namespace

TEST_CASE("happy scenario settles and forwards the collision report") {
    const auto cfg = load("happy.json");
    const auto r = world::run(cfg);
    REQUIRE(r.sessions.size() == 1);
    const auto& s = r.sessions[0];
    CHECK(s.session.label() == "WITHDRAWN");
    CHECK(s.violations.empty());
    CHECK(s.forwarded == std::map<std::string, std::string>{{"T_o", "1712000000"}, {"C_o", "1"}});
    CHECK(r.ledger.escrow("s1").state == ledger::EscrowState::Withdrawn);
    CHECK(r.ledger.balance("car-a") == 100);
    CHECK(r.ledger.balance("car-b") == 900);
    CHECK(r.ledger.total_tokens() == initial_tokens(cfg));
    for (const auto& node : cfg.nodes) CHECK(r.ledger.hot(node).links_intact());
    for (const auto& phase : world::kPhases) CHECK(r.metrics.phases.contains(phase));
    CHECK(r.sessions_text(cfg.sessions) == "s1|WITHDRAWN|WITHDRAWN\n");
}

TEST_CASE("underfunded escrow is refunded") {
    const auto cfg = load("funds-short.json");
    const auto r = world::run(cfg);
    CHECK(r.sessions[0].session.label() == "FAILED(funds)");
    CHECK(r.ledger.escrow("s1").state == ledger::EscrowState::Refunded);
    CHECK(r.ledger.total_tokens() == initial_tokens(cfg));
    for (const auto& [who, v] : cfg.balances) CHECK(r.ledger.balance(who) == v);
}

TEST_CASE("tampered producers fail with the first failing check") {
    const auto cfg = load("tamper.json");
    const auto r = world::run(cfg);
    REQUIRE(r.sessions.size() == cfg.sessions.size());
    for (std::size_t i = 0; i < r.sessions.size(); ++i) {
        CAPTURE(cfg.sessions[i].id);
        CHECK(r.sessions[i].session.label() == cfg.sessions[i].expect);
        const auto want = cfg.sessions[i].expect == "WITHDRAWN" ? ledger::EscrowState::Withdrawn
                                                                 : ledger::EscrowState::Refunded;
        CHECK(r.ledger.escrow(cfg.sessions[i].id).state == want);
        if (want == ledger::EscrowState::Refunded) CHECK(r.sessions[i].forwarded.empty());
    }
    CHECK(r.ledger.total_tokens() == initial_tokens(cfg));
}

TEST_CASE("runs are reproducible") {
    const auto cfg = load("tamper.json");
    const auto a = world::run(cfg);
    const auto b = world::run(cfg);
    CHECK(a.transcript_text() == b.transcript_text());
    CHECK(a.ledger.dump_records() == b.ledger.dump_records());
    CHECK(a.ledger.escrow_table() == b.ledger.escrow_table());
}

TEST_CASE("lossy network still settles every escrow exactly once") {
    auto base = load("tamper.json");
    base.faults.drop_per_mille = 150;
    base.faults.max_delay = 4;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        CAPTURE(seed);
        auto cfg = base;
        cfg.seed = seed;
        const auto r = world::run(cfg);
        CHECK(r.ledger.total_tokens() == initial_tokens(cfg));
        std::int64_t paid = 0;
        for (const auto& s : r.sessions) {
            CHECK(s.session.terminal());
            const auto& e = r.ledger.escrow(s.session.id);
            CHECK((e.state == ledger::EscrowState::Withdrawn || e.state == ledger::EscrowState::Refunded));
            if (s.session.state == relayer::State::Withdrawn) CHECK(e.state == ledger::EscrowState::Withdrawn);
            if (e.state == ledger::EscrowState::Withdrawn) {
                CHECK(s.session.passed_verified);
                CHECK(s.session.passed_acked);
                CHECK(r.ledger.balance(e.beneficiary) == e.amount);
                paid += e.amount;
            }
        }
        CHECK(r.ledger.balance("car-b") == cfg.balances.at("car-b") - paid);

        const auto again = world::run(cfg);
        CHECK(again.transcript_text() == r.transcript_text());
    }
}

TEST_CASE("seed override replaces the file seed") {
    CHECK(load("happy.json", 7).seed == 7);
    CHECK(load("happy.json").seed == 42);
}

TEST_CASE("bad scenarios name the offending field") {
    const auto happy = slurp(kScenarios / "happy.json");
    REQUIRE_FALSE(happy.empty());
    auto edit = [&](const std::string& from, const std::string& to) {
        auto text = happy;
        const auto at = text.find(from);
        REQUIRE(at != std::string::npos);
        return config_error(text.replace(at, from.size(), to));
    };

    CHECK(config_error("{").find("not valid JSON") != std::string::npos);
    CHECK(config_error("{}").find("scenario.seed") != std::string::npos);
    CHECK(edit("\"seed\": 42", "\"seed\": \"x\"").find("seed: wrong type") != std::string::npos);
    CHECK(edit("\"tamper\": \"none\"", "\"tamper\": \"melt\"").find("tamper") != std::string::npos);
    CHECK(edit("\"contract_y\": \"contract-y\"", "\"contract_y\": \"nope\"").find("contract_y") != std::string::npos);
    CHECK(edit("square.prog", "missing.prog").find("registry.Tesla[1]") != std::string::npos);
    CHECK(edit("\"in-bbox\"", "\"near\"").find("predicate") != std::string::npos);
}
