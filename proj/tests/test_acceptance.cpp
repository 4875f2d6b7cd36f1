// Runs every acceptance criterion and prints one PASS/FAIL line for each.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "json.hpp"
#include "devproof/cli.hpp"
#include "devproof/contract.hpp"
#include "devproof/error.hpp"
#include "devproof/fc_scheme.hpp"
#include "devproof/pcd_chain.hpp"
#include "devproof/relayer.hpp"

using namespace devproof;
namespace fs = std::filesystem;
using field::Fp;

namespace {

constexpr std::uint64_t P = field::kTestPrime;
constexpr std::uint64_t Q = field::kRuntimePrime;
const fs::path kScenarios = fs::path(DEVPROOF_SOURCE_DIR) / "scenarios";

Fp f17(std::uint64_t v) { return {v, P}; }

struct Outcome {
    bool pass = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        if (pass) detail = what;
        pass = false;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("devproof-acceptance-" + name);
    fs::remove_all(p);
    return p;
}

int run_cli(const std::string& scenario, const fs::path& out) {
    std::ostringstream o, e;
    return cli::cmd_run(cli::RunOptions{(kScenarios / scenario).string(), out.string()}, o, e);
}

// dense row evaluation, independent of the library's checker
bool rows_hold(const r1cs::Instance& inst, const std::vector<Fp>& z) {
    auto dense = [&](const r1cs::SparseMatrix& m) {
        std::vector<std::vector<std::uint64_t>> d(inst.n, std::vector<std::uint64_t>(inst.n, 0));
        for (const auto& e : m.entries()) d[e.row - 1][e.col - 1] = e.value.value();
        return d;
    };
    const auto a = dense(inst.a), b = dense(inst.b), c = dense(inst.c);
    for (std::uint32_t i = 0; i < inst.n; ++i) {
        std::uint64_t az = 0, bz = 0, cz = 0;
        for (std::uint32_t j = 0; j < inst.n; ++j) {
            az = (az + a[i][j] * z[j].value()) % P;
            bz = (bz + b[i][j] * z[j].value()) % P;
            cz = (cz + c[i][j] * z[j].value()) % P;
        }
        if (az * bz % P != cz) return false;
    }
    return true;
}

Outcome happy_path_timing() {
    Outcome o;
    const auto dir = scratch("timing");
    const auto t0 = std::chrono::steady_clock::now();
    const int code = run_cli("happy.json", dir);
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.expect(code == cli::kOk, "happy scenario did not meet its expectations");
    o.expect(secs < 5.0, "took " + std::to_string(secs) + " s");
    const auto metrics = nlohmann::json::parse(slurp(dir / cli::kMetrics), nullptr, false);
    o.expect(!metrics.is_discarded(), "metrics.json unreadable");
    if (o.pass)
        for (const char* phase : {"prove", "verify", "write", "confirm", "read"})
            o.expect(metrics["phases"].contains(phase) && metrics["phases"][phase]["count"].get<int>() > 0,
                     std::string("phase missing: ") + phase);
    if (o.pass) o.detail = std::to_string(secs * 1000).substr(0, 6) + " ms";
    return o;
}

Outcome structure_suite() {
    Outcome o;
    int accepted = 0, total = 0;
    for (std::size_t which = 0; which < 3; ++which)
        for (std::uint32_t r = 1; r <= 4; ++r)
            for (std::uint32_t c = 1; c <= 4; ++c)
                for (std::uint64_t v = 1; v < P; ++v) {
                    r1cs::Instance inst{4, P, {2}, {4, P}, {4, P}, {4, P}};
                    auto& m = which == 0 ? inst.a : which == 1 ? inst.b : inst.c;
                    m = r1cs::SparseMatrix(4, P, {{r, c, f17(v)}});
                    const bool oracle = which == 2 ? r == c : r > c;
                    const auto keys = fc::setup(128, inst);
                    const auto s = fc::prove_structure(keys.pk);
                    const bool got = fc::verify_structure(keys.vk, s.a, s.b, s.c).accepted;
                    ++total;
                    accepted += got;
                    o.expect(got == oracle, "mismatch at matrix " + std::to_string(which) + " (" + std::to_string(r) +
                                                "," + std::to_string(c) + ")=" + std::to_string(v));
                }
    if (o.pass) o.detail = std::to_string(accepted) + "/" + std::to_string(total) + " accepted, all as predicted";
    return o;
}

Outcome satisfaction_suite() {
    Outcome o;
    const auto programs = corpus::all();
    o.expect(programs.size() >= 5, "corpus too small");
    std::size_t checked = 0;
    for (const auto& [name, prog] : programs) {
        const auto inst = r1cs::build_program(prog, P);
        std::vector<Fp> in(prog.num_inputs, f17(0));
        while (true) {
            const auto wires = r1cs::execute(prog, in);
            const auto z = r1cs::make_assignment(prog, in);
            o.expect(r1cs::is_satisfied(inst, z) && rows_hold(inst, z.z), name + ": honest assignment rejected");
            o.expect(z.at(inst.public_positions.back()) == wires[prog.output], name + ": output column differs");
            // any other claimed output contradicts direct execution
            for (std::uint64_t d = 1; d < P; ++d) {
                auto bad = z;
                const auto pos = inst.public_positions.back() - 1;
                bad.z[pos] = bad.z[pos] + f17(d);
                o.expect(!r1cs::is_satisfied(inst, bad), name + ": wrong output accepted");
            }
            ++checked;
            std::uint32_t i = 0;
            for (; i < prog.num_inputs; ++i) {
                in[i] = f17((in[i].value() + 1) % P);
                if (!in[i].is_zero()) break;
            }
            if (i == prog.num_inputs) break;
        }
    }

    std::mt19937_64 rng(17);
    int coincidences = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& [name, prog] = programs[trial % programs.size()];
        const auto inst = r1cs::build_program(prog, P);
        r1cs::Assignment z;
        z.z.push_back(f17(1));
        while (z.z.size() < inst.n) z.z.push_back(f17(rng() % P));
        const bool oracle = rows_hold(inst, z.z);
        coincidences += oracle;
        o.expect(r1cs::is_satisfied(inst, z) == oracle, name + ": random assignment disagrees with row evaluation");
    }
    if (o.pass)
        o.detail = std::to_string(checked) + " executions, 1000 random (" + std::to_string(coincidences) +
                   " coincidental witnesses)";
    return o;
}

Outcome tamper_suite() {
    Outcome o;
    const auto prog = r1cs::parse_program(corpus::kMixed);
    const auto keys = fc::setup(128, r1cs::build_program(prog, Q));
    const std::vector<Fp> in{Fp(3, Q), Fp(4, Q), Fp(5, Q)};
    const auto z = r1cs::make_assignment(prog, in);
    std::vector<Fp> publics;
    for (auto pos : keys.pk.instance.public_positions) publics.push_back(z.at(pos));
    const auto bytes = fc::encode_bundle(fc::prove(keys.pk, z));
    o.expect(fc::verify_bundle_bytes(keys.vk, bytes, publics).accepted, "reference bundle rejected");
    o.expect(bytes.size() >= 200, "reference bundle shorter than 200 bytes");
    if (!o.pass) return o;

    std::vector<std::size_t> positions(bytes.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    std::mt19937_64 rng(2024);
    std::shuffle(positions.begin(), positions.end(), rng);
    positions.resize(200);
    for (auto pos : positions) {
        auto mutated = bytes;
        mutated[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        o.expect(!fc::verify_bundle_bytes(keys.vk, mutated, publics).accepted,
                 "mutation at byte " + std::to_string(pos) + " accepted");
    }
    if (o.pass) o.detail = "200/200 rejected over " + std::to_string(bytes.size()) + " bytes";
    return o;
}

Outcome chain_suite() {
    Outcome o;
    const auto square = r1cs::parse_program(corpus::kSquare);
    const auto keys = fc::setup(128, r1cs::build_program(square, P));
    const pcd::KeyRegistry registry{{keys.vk.digest, keys.vk}};

    pcd::ChainProof chain;
    Fp cur = f17(3);
    for (std::uint32_t i = 1; i <= 3; ++i) {
        const std::vector<Fp> in{cur};
        chain = pcd::extend_chain(std::move(chain), pcd::make_step(i, square, keys, in, i == 3 ? 0 : 1));
        cur = chain.final_claim;
    }
    std::uint64_t oracle = 3;
    for (int i = 0; i < 3; ++i) oracle = oracle * oracle % P;
    o.expect(oracle == 16, "oracle disagrees with iterated squaring");
    o.expect(chain.final_claim == f17(oracle), "y_T = " + std::to_string(chain.final_claim.value()));
    o.expect(pcd::verify_chain(chain, registry).accepted, "honest chain rejected");

    int mutants = 0;
    for (std::size_t s = 0; s < 3; ++s) {
        for (std::uint64_t v = 0; v < P; ++v) {
            if (s < 2 && f17(v) != chain.steps[s].output) {
                auto bad = chain;
                bad.steps[s].output = f17(v);
                o.expect(!pcd::verify_chain(bad, registry).accepted, "intermediate output mutation accepted");
                ++mutants;
            }
            if (s > 0 && f17(v) != chain.steps[s].inputs[0]) {
                auto bad = chain;
                bad.steps[s].inputs[0] = f17(v);
                o.expect(!pcd::verify_chain(bad, registry).accepted, "intermediate input mutation accepted");
                ++mutants;
            }
        }
        for (std::uint32_t link : {0u, 1u, 2u, 3u, 0xffffffffu}) {
            if (link == chain.steps[s].link_position) continue;
            auto bad = chain;
            bad.steps[s].link_position = link;
            o.expect(!pcd::verify_chain(bad, registry).accepted, "link mutation accepted at step " + std::to_string(s + 1));
            ++mutants;
        }
    }
    if (o.pass) o.detail = "y_T = 16, " + std::to_string(mutants) + " mutants rejected";
    return o;
}

Outcome model_suite() {
    Outcome o;
    const auto r = relayer::model_check();
    for (const auto& e : r.errors) o.expect(false, e);
    o.expect(r.states < 10000, std::to_string(r.states) + " states");
    o.expect(r.withdrawn_paths > 0 && r.failed_paths > 0, "search never reached both outcomes");
    if (o.pass)
        o.detail = std::to_string(r.states) + " states, " + std::to_string(r.transitions) + " transitions";
    return o;
}

Outcome algorithm_one_suite() {
    using namespace contract;
    Outcome o;
    const GeoBox seattle{"Seattle", 47400000, 47800000, -122500000, -122100000};
    const GeoBox portland{"Portland", 45400000, 45700000, -122900000, -122400000};
    ContractSpec spec;
    spec.id = "road-conditions";
    spec.required_device_type = "Tesla";
    spec.guards = {{"city", "gps", Predicate::InBox, "Seattle"}, {"type", "device_type", Predicate::Equals, "Tesla"}};
    spec.forward = {{"timestamp", "T_o"}, {"collision", "C_o"}};
    spec.next_hop = "node-y";
    spec.geo = {seattle, portland};

    const auto collision = r1cs::parse_program("inputs 2\nw3 = mul w1 w1\nw4 = mul w2 w2\nw5 = add w3 w4\noutput w5\n");
    const auto tesla = device::make_device("car-a", "Tesla", collision, Q);
    const auto thermo = device::make_device("thermo", "Ecobee", r1cs::parse_program(corpus::kProduct), Q);
    const ComplianceRegistry registry{{"Tesla", {tesla.vk_digest()}}, {"Ecobee", {thermo.vk_digest()}}};
    auto meta = [](std::string gps, std::string type) {
        return device::Metadata{
            {"gps", std::move(gps)}, {"timestamp", "1712000000"}, {"collision", "1"}, {"device_type", std::move(type)}};
    };
    const std::vector<Fp> in{Fp(3, Q), Fp::from_signed(-4, Q)};
    const std::string in_seattle = "47610000,-122330000", in_portland = "45520000,-122680000";

    const auto good = device::emit_bundle(tesla, in, meta(in_seattle, "Tesla"));
    const auto d = evaluate_contract(spec, registry, good, tesla.keys.vk);
    o.expect(d.forwarded && d.outputs == std::map<std::string, std::string>{{"T_o", "1712000000"}, {"C_o", "1"}},
             "valid bundle not forwarded unchanged");

    auto reason = [&](const device::DataBundle& b, const fc::VerificationKey& vk) {
        return evaluate_contract(spec, registry, b, vk).reason;
    };
    const auto city = reason(device::emit_bundle(tesla, in, meta(in_portland, "Tesla")), tesla.keys.vk);
    o.expect(city == "guard:city", "wrong city gave " + city);

    const auto type = reason(device::emit_bundle(thermo, in, meta(in_seattle, "Ecobee")), thermo.keys.vk);
    o.expect(type == "compliance:type-mismatch", "wrong type gave " + type);

    const auto rogue_bundle = device::emit_bundle(tesla, in, meta(in_seattle, "Tesla"), device::Tamper::RogueKey);
    const auto rogue_keys = fc::setup(129, tesla.keys.pk.instance);
    o.expect(rogue_keys.vk.digest == rogue_bundle.vk_digest, "rogue bundle not bound to the rogue key");
    const auto unreg = reason(rogue_bundle, rogue_keys.vk);
    o.expect(unreg == "compliance:unregistered", "unregistered vk gave " + unreg);

    const auto forged = device::emit_bundle(tesla, in, meta(in_seattle, "Tesla"), device::Tamper::ForgeOutput);
    const auto invalid = reason(forged, tesla.keys.vk);
    o.expect(invalid == "proof", "invalid proof gave " + invalid);

    // a bundle failing both the proof and the city guard reports only the proof
    const auto masked =
        reason(device::emit_bundle(tesla, in, meta(in_portland, "Tesla"), device::Tamper::ForgeOutput), tesla.keys.vk);
    o.expect(masked == "proof", "proof failure did not mask the guard: " + masked);
    return o;
}

Outcome determinism_suite() {
    Outcome o;
    for (const char* name : {"happy.json", "tamper.json", "funds-short.json"}) {
        const auto a = scratch(std::string("det-a-") + name), b = scratch(std::string("det-b-") + name);
        o.expect(run_cli(name, a) == cli::kOk && run_cli(name, b) == cli::kOk, std::string(name) + " failed to run");
        o.expect(slurp(a / cli::kTranscript) == slurp(b / cli::kTranscript), std::string(name) + ": transcripts differ");
        o.expect(slurp(a / cli::kLedgerDump) == slurp(b / cli::kLedgerDump), std::string(name) + ": ledger dumps differ");
        o.expect(!slurp(a / cli::kTranscript).empty(), std::string(name) + ": empty transcript");
    }
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"happy path under 5 s with prove/verify/write/confirm/read metrics", happy_path_timing},
        {"structure verifier accept set over single-entry 4x4 matrices in F_17", structure_suite},
        {"satisfaction agrees with execution and row evaluation", satisfaction_suite},
        {"200 sampled byte mutations of the reference bundle rejected", tamper_suite},
        {"3-step square chain gives 16 and rejects mutated links and outputs", chain_suite},
        {"exhaustive protocol model check", model_suite},
        {"contract pipeline first-failure reasons", algorithm_one_suite},
        {"repeated runs are byte-identical", determinism_suite},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %zu  %s%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.empty() ? "" : "  -- ",
                    o.detail.c_str());
    }
    return failed == 0 ? 0 : 1;
}
