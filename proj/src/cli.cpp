#include "devproof/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "devproof/fc_scheme.hpp"
#include "devproof/scenario.hpp"

namespace devproof::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint8_t kProofFileTag = 'Z';

Bytes read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::NotFound, "cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, std::span<const std::uint8_t> data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + p.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

void write_text(const fs::path& p, const std::string& text) {
    write_file(p, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& p) {
    const auto b = read_file(p);
    return std::string(b.begin(), b.end());
}

nlohmann::json metrics_json(const world::Metrics& m, std::int64_t wall_us) {
    nlohmann::json phases = nlohmann::json::object();
    for (const auto& name : world::kPhases) {
        auto it = m.phases.find(name);
        const std::vector<std::int64_t> none;
        const auto& v = it == m.phases.end() ? none : it->second;
        const auto total = std::accumulate(v.begin(), v.end(), std::int64_t{0});
        phases[name] = {{"count", v.size()},
                        {"total_us", total},
                        {"mean_us", v.empty() ? 0 : total / static_cast<std::int64_t>(v.size())},
                        {"max_us", v.empty() ? 0 : *std::max_element(v.begin(), v.end())}};
    }
    return {{"phases", phases}, {"accepts", m.accepts}, {"rejects", m.rejects}, {"wall_us", wall_us}};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

std::string field_of(const std::string& line, std::size_t idx) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < idx; ++i) {
        start = line.find('|', start);
        if (start == std::string::npos) return {};
        ++start;
    }
    return line.substr(start, line.find('|', start) - start);
}

} // namespace

int cmd_keygen(const KeygenOptions& o, std::ostream& out, std::ostream& err) {
    try {
        const auto prog = r1cs::load_program(o.firmware);
        const auto p = o.modulus == 0 ? field::kRuntimePrime : o.modulus;
        const auto keys = fc::setup(o.lambda, r1cs::build_program(prog, p, o.bound_inputs));
        fs::create_directories(o.out_dir);
        ByteWriter pp;
        fc::write_params(pp, keys.pp);
        write_file(fs::path(o.out_dir) / "pp.bin", pp.bytes());
        write_file(fs::path(o.out_dir) / "pk.bin", fc::encode_proving_key(keys.pk));
        write_file(fs::path(o.out_dir) / "vk.bin", fc::encode_verification_key(keys.vk));
        out << to_hex(keys.vk.digest) << "\n";
        return kOk;
    } catch (const std::exception& e) {
        err << "keygen: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_prove(const ProveOptions& o, std::ostream& out, std::ostream& err) {
    try {
        const auto pk = fc::decode_proving_key(read_file(fs::path(o.keys_dir) / "pk.bin"));
        const auto prog = r1cs::load_program(o.firmware);
        const auto p = pk.pp.modulus;
        const auto npub = pk.instance.public_positions.size();
        const auto bound = static_cast<std::uint32_t>(npub > prog.num_inputs ? npub - prog.num_inputs - 1 : 0);
        if (npub < prog.num_inputs + 1 || !(r1cs::build_program(prog, p, bound) == pk.instance)) {
            err << "prove: firmware does not match the proving key\n";
            return kUsage;
        }
        std::vector<field::Fp> inputs;
        for (auto v : o.inputs) inputs.push_back(field::Fp::from_signed(v, p));
        const std::vector<field::Fp> zeros(bound, field::Fp::zero(p));
        const auto z = r1cs::make_assignment(prog, inputs, zeros);
        const auto bundle = fc::prove(pk, z);

        std::vector<field::Fp> publics;
        for (auto pos : pk.instance.public_positions) publics.push_back(z.at(pos));
        ByteWriter w;
        w.u8(kProofFileTag);
        w.u32(static_cast<std::uint32_t>(publics.size()));
        for (const auto& x : publics) field::write_element(w, x);
        w.blob(fc::encode_bundle(bundle));
        write_file(o.out, w.bytes());
        out << "output " << publics[prog.num_inputs].value() << "\n";
        return kOk;
    } catch (const std::exception& e) {
        err << "prove: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
    fc::VerificationKey vk;
    std::vector<field::Fp> publics;
    Bytes proof_bytes;
    try {
        vk = fc::decode_verification_key(read_file(fs::path(o.keys_dir) / "vk.bin"));
        const auto file = read_file(o.proof);
        ByteReader r(file);
        if (r.u8() != kProofFileTag) throw Error(ErrorKind::EncodingError, "not a proof file");
        const auto n = r.u32();
        if (n > fc::kMaxConstraints) throw Error(ErrorKind::EncodingError, "too many publics");
        for (std::uint32_t i = 0; i < n; ++i) publics.push_back(field::read_element(r, vk.pp.modulus));
        const auto blob = r.blob();
        proof_bytes.assign(blob.begin(), blob.end());
        r.expect_done();
    } catch (const Error& e) {
        err << "verify: " << e.what() << "\n";
        return kUsage;
    }
    const auto v = fc::verify_bundle_bytes(vk, proof_bytes, publics);
    if (!v) {
        out << "reject: " << v.reason << "\n";
        return kRejected;
    }
    out << "accept\n";
    return kOk;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
    if (o.format != "text" && o.format != "machine") {
        err << "run: --format must be text or machine\n";
        return kUsage;
    }
    world::WorldConfig cfg;
    try {
        cfg = scenario::load(o.scenario, o.seed);
    } catch (const Error& e) {
        err << "run: " << e.what() << "\n";
        return kUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto result = world::run(cfg);
    const auto wall = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0);

    bool met = true;
    for (std::size_t i = 0; i < result.sessions.size(); ++i)
        met = met && result.sessions[i].session.label() == cfg.sessions[i].expect;

    const auto metrics = metrics_json(result.metrics, wall.count());
    try {
        fs::create_directories(o.out_dir);
        const fs::path dir(o.out_dir);
        write_text(dir / kTranscript, result.transcript_text());
        write_text(dir / kLedgerDump, result.ledger.dump_records());
        write_text(dir / kEscrowTable, result.ledger.escrow_table());
        write_text(dir / kSessions, result.sessions_text(cfg.sessions));
        write_text(dir / kMetrics, metrics.dump(2) + "\n");
    } catch (const Error& e) {
        err << "run: " << e.what() << "\n";
        return kUsage;
    }

    if (o.format == "machine") {
        nlohmann::json summary = {{"expectations_met", met}, {"metrics", metrics}, {"sessions", nlohmann::json::array()}};
        for (std::size_t i = 0; i < result.sessions.size(); ++i)
            summary["sessions"].push_back({{"id", result.sessions[i].session.id},
                                           {"state", result.sessions[i].session.label()},
                                           {"expect", cfg.sessions[i].expect},
                                           {"forwarded", result.sessions[i].forwarded}});
        out << summary.dump() << "\n";
    } else {
        for (std::size_t i = 0; i < result.sessions.size(); ++i) {
            const auto& s = result.sessions[i];
            const bool ok = s.session.label() == cfg.sessions[i].expect;
            out << (ok ? "ok   " : "FAIL ") << s.session.id << "  " << s.session.label();
            if (!ok) out << "  (expected " << cfg.sessions[i].expect << ")";
            for (const auto& [k, v] : s.forwarded) out << "  " << k << "=" << v;
            out << "\n";
        }
        out << "phase      count   mean_us    max_us\n";
        for (const auto& name : world::kPhases) {
            const auto& ph = metrics["phases"][name];
            char row[96];
            std::snprintf(row, sizeof row, "%-9s %6lld %9lld %9lld\n", name.c_str(),
                          static_cast<long long>(ph["count"].get<std::int64_t>()),
                          static_cast<long long>(ph["mean_us"].get<std::int64_t>()),
                          static_cast<long long>(ph["max_us"].get<std::int64_t>()));
            out << row;
        }
        out << "accepts " << result.metrics.accepts << ", rejects " << result.metrics.rejects << ", wall "
            << wall.count() << " us\n";
    }
    return met ? kOk : kRejected;
}

int cmd_inspect(const InspectOptions& o, std::ostream& out, std::ostream& err) {
    struct Query {
        const char* name;
        const char* file;
        std::size_t session_field; // column holding the session id, or npos
        const char* kind;          // record kind filter for the ledger dump
    };
    static const Query kQueries[] = {
        {"proofs", kLedgerDump, std::string::npos, "proof"},
        {"records", kLedgerDump, std::string::npos, nullptr},
        {"escrow", kEscrowTable, 0, nullptr},
        {"sessions", kSessions, 0, nullptr},
        {"transcript", kTranscript, 1, nullptr},
    };
    const Query* q = nullptr;
    for (const auto& k : kQueries)
        if (o.query == k.name) q = &k;
    if (!q) {
        err << "inspect: unknown query '" << o.query << "' (proofs, records, escrow, sessions, transcript)\n";
        return kUsage;
    }
    std::string text;
    try {
        text = read_text(fs::path(o.dir) / q->file);
    } catch (const Error& e) {
        err << "inspect: " << e.what() << "\n";
        return kUsage;
    }
    for (const auto& line : lines_of(text)) {
        if (q->kind && field_of(line, 2) != q->kind) continue;
        if (!o.session.empty() && q->session_field != std::string::npos && field_of(line, q->session_field) != o.session)
            continue;
        out << line << "\n";
    }
    return kOk;
}

} // namespace devproof::cli
