#include "devproof/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace devproof::scenario {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& why) {
    throw Error(ErrorKind::ConfigError, where + ": " + why);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) bad(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(where + "." + key, "missing");
    return *it;
}

template <class T>
T as(const json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        bad(where, "wrong type");
    }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    return as<T>(need(j, key, where), where + "." + key);
}

template <class T>
T get_or(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    return as<T>(j.at(key), where + "." + key);
}

const json& list(const json& j, const char* key, const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_array()) bad(where + "." + key, "expected a list");
    return v;
}

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

class Builder {
public:
    Builder(const json& root, std::filesystem::path base) : root_(root), base_(std::move(base)) {}

    world::WorldConfig build(std::optional<std::uint64_t> seed_override) {
        world::WorldConfig cfg;
        cfg.seed = seed_override ? *seed_override : get<std::uint64_t>(root_, "seed", "scenario");
        cfg.modulus = get_or<std::uint64_t>(root_, "modulus", "scenario", field::kRuntimePrime);
        lambda_ = get_or<std::uint32_t>(root_, "lambda", "scenario", 128);
        modulus_ = cfg.modulus;

        const auto& nodes = list(root_, "nodes", "scenario");
        for (std::size_t i = 0; i < nodes.size(); ++i) cfg.nodes.push_back(as<std::string>(nodes[i], at("nodes", i)));

        contract::GeoTable geo;
        if (root_.contains("geo")) {
            const auto& g = list(root_, "geo", "scenario");
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto w = at("geo", i);
                geo.push_back({get<std::string>(g[i], "city", w), get<std::int64_t>(g[i], "lat_min", w),
                               get<std::int64_t>(g[i], "lat_max", w), get<std::int64_t>(g[i], "lon_min", w),
                               get<std::int64_t>(g[i], "lon_max", w)});
            }
        }

        if (root_.contains("registry")) {
            const auto& reg = need(root_, "registry", "scenario");
            if (!reg.is_object()) bad("registry", "expected an object");
            for (const auto& [type, paths] : reg.items()) {
                const std::string w = "registry." + type;
                if (!paths.is_array()) bad(w, "expected a list of firmware paths");
                auto& set = cfg.registry[type];
                for (std::size_t i = 0; i < paths.size(); ++i)
                    set.insert(registered_digest(as<std::string>(paths[i], at(w, i)), at(w, i)));
            }
        }

        if (root_.contains("balances")) {
            const auto& b = need(root_, "balances", "scenario");
            if (!b.is_object()) bad("balances", "expected an object");
            for (const auto& [who, amount] : b.items()) cfg.balances[who] = as<std::int64_t>(amount, "balances." + who);
        }

        if (root_.contains("timeouts")) {
            const auto& t = need(root_, "timeouts", "scenario");
            cfg.timeout = get_or<std::uint64_t>(t, "step", "timeouts", cfg.timeout);
            cfg.release_delay = get_or<std::uint64_t>(t, "release_delay", "timeouts", cfg.release_delay);
            if (cfg.timeout == 0) bad("timeouts.step", "must be positive");
        }
        if (root_.contains("faults")) {
            const auto& f = need(root_, "faults", "scenario");
            cfg.faults.drop_per_mille = get_or<std::uint32_t>(f, "drop_per_mille", "faults", 0);
            cfg.faults.max_delay = get_or<std::uint32_t>(f, "max_delay", "faults", 0);
            if (cfg.faults.drop_per_mille > 1000) bad("faults.drop_per_mille", "must be at most 1000");
        }

        const auto& devices = list(root_, "devices", "scenario");
        for (std::size_t i = 0; i < devices.size(); ++i) {
            auto dev = device_at(devices[i], at("devices", i));
            const auto id = dev.identity.id;
            if (!cfg.devices.emplace(id, std::move(dev)).second) bad(at("devices", i) + ".id", "duplicate '" + id + "'");
        }

        const auto& contracts = list(root_, "contracts", "scenario");
        for (std::size_t i = 0; i < contracts.size(); ++i) {
            const auto w = at("contracts", i);
            const auto& c = contracts[i];
            world::ContractSetup cs;
            cs.node = get<std::string>(c, "node", w);
            cs.spec.id = get<std::string>(c, "id", w);
            cs.spec.required_device_type = get<std::string>(c, "required_device_type", w);
            cs.spec.next_hop = get_or<std::string>(c, "next_hop", w, "");
            cs.spec.geo = geo;
            if (c.contains("guards")) {
                const auto& gs = list(c, "guards", w);
                for (std::size_t k = 0; k < gs.size(); ++k) {
                    const auto gw = at(w + ".guards", k);
                    contract::Guard g;
                    g.name = get<std::string>(gs[k], "name", gw);
                    g.field = get<std::string>(gs[k], "field", gw);
                    try {
                        g.predicate = contract::parse_predicate(get<std::string>(gs[k], "predicate", gw));
                    } catch (const Error&) {
                        bad(gw + ".predicate", "expected equals or in-bbox");
                    }
                    g.constant = get<std::string>(gs[k], "constant", gw);
                    cs.spec.guards.push_back(std::move(g));
                }
            }
            if (c.contains("forward")) {
                const auto& fs = list(c, "forward", w);
                for (std::size_t k = 0; k < fs.size(); ++k) {
                    const auto fw = at(w + ".forward", k);
                    cs.spec.forward.emplace_back(get<std::string>(fs[k], "from", fw), get<std::string>(fs[k], "to", fw));
                }
            }
            const auto id = cs.spec.id;
            if (!cfg.contracts.emplace(id, std::move(cs)).second) bad(w + ".id", "duplicate '" + id + "'");
        }

        const auto& sessions = list(root_, "sessions", "scenario");
        for (std::size_t i = 0; i < sessions.size(); ++i) {
            const auto w = at("sessions", i);
            const auto& s = sessions[i];
            world::SessionSetup ss;
            ss.id = get<std::string>(s, "id", w);
            ss.device_a = get<std::string>(s, "a", w);
            ss.device_b = get<std::string>(s, "b", w);
            ss.contract_x = get<std::string>(s, "contract_x", w);
            ss.contract_y = get<std::string>(s, "contract_y", w);
            ss.amount = get<std::int64_t>(s, "amount", w);
            ss.deposit = get_or<std::int64_t>(s, "deposit", w, ss.amount);
            ss.start = get_or<std::uint64_t>(s, "start", w, 0);
            ss.expect = get_or<std::string>(s, "expect", w, "WITHDRAWN");
            cfg.sessions.push_back(std::move(ss));
        }

        world::validate(cfg);
        return cfg;
    }

private:
    r1cs::GateProgram firmware(const std::string& rel, const std::string& where) {
        const auto path = (base_ / rel).lexically_normal();
        try {
            return r1cs::load_program(path.string());
        } catch (const Error& e) {
            bad(where, e.what());
        }
    }

    Digest registered_digest(const std::string& rel, const std::string& where) {
        const auto prog = firmware(rel, where);
        return fc::setup(lambda_, r1cs::build_program(prog, modulus_, 1)).vk.digest;
    }

    world::DeviceSetup device_at(const json& d, const std::string& w) {
        world::DeviceSetup dev;
        const auto id = get<std::string>(d, "id", w);
        const auto type = get<std::string>(d, "type", w);
        dev.node = get<std::string>(d, "node", w);
        dev.scale = get_or<std::int64_t>(d, "scale", w, 1);
        auto prog = firmware(get<std::string>(d, "firmware", w), w + ".firmware");

        if (d.contains("readings")) {
            const auto& rs = list(d, "readings", w);
            for (std::size_t i = 0; i < rs.size(); ++i) {
                const auto rw = at(w + ".readings", i);
                dev.readings.push_back({get<std::string>(rs[i], "channel", rw), get<std::int64_t>(rs[i], "raw", rw),
                                        get_or<std::uint64_t>(rs[i], "tick", rw, 0)});
                try {
                    device::encode_reading(dev.readings.back(), dev.scale, modulus_);
                } catch (const Error& e) {
                    bad(rw + ".raw", e.what());
                }
            }
        }
        if (d.contains("metadata")) {
            const auto& m = need(d, "metadata", w);
            if (!m.is_object()) bad(w + ".metadata", "expected an object");
            for (const auto& [k, v] : m.items()) dev.metadata[k] = as<std::string>(v, w + ".metadata." + k);
        }
        dev.metadata.emplace("device_type", type);
        try {
            dev.tamper = device::parse_tamper(get_or<std::string>(d, "tamper", w, "none"));
        } catch (const Error&) {
            bad(w + ".tamper", "unknown directive");
        }
        dev.identity = device::make_device(id, type, std::move(prog), modulus_, true, lambda_);
        return dev;
    }

    const json& root_;
    std::filesystem::path base_;
    std::uint32_t lambda_ = 128;
    std::uint64_t modulus_ = field::kRuntimePrime;
};

} // namespace

world::WorldConfig parse(std::string_view json_text, const std::filesystem::path& base,
                         std::optional<std::uint64_t> seed_override) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        bad("scenario", std::string("not valid JSON: ") + e.what());
    }
    return Builder(root, base).build(seed_override);
}

world::WorldConfig load(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad(path.string(), "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.parent_path(), seed_override);
}

} // namespace devproof::scenario
