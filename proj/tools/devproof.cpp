#include <iostream>

#include "CLI11.hpp"
#include "devproof/cli.hpp"

int main(int argc, char** argv) {
    using namespace devproof::cli;

    CLI::App app{"Device proof toolkit: keys, proofs and protocol scenarios"};
    app.require_subcommand(1);

    KeygenOptions kg;
    auto* keygen = app.add_subcommand("keygen", "run setup for a firmware program and write pp/pk/vk");
    keygen->add_option("firmware", kg.firmware, "gate program file")->required();
    keygen->add_option("--out", kg.out_dir, "output directory")->required();
    keygen->add_option("--modulus", kg.modulus, "field prime (default 2^64-2^32+1)");
    keygen->add_option("--lambda", kg.lambda, "security parameter recorded in pp");
    keygen->add_option("--bound", kg.bound_inputs, "extra unconstrained public inputs");

    ProveOptions pr;
    auto* prove = app.add_subcommand("prove", "execute firmware and write a proof file");
    prove->add_option("--keys", pr.keys_dir, "directory with pk.bin")->required();
    prove->add_option("--firmware", pr.firmware, "gate program file")->required();
    prove->add_option("--input", pr.inputs, "input value (repeat per input)")->allow_extra_args(false);
    prove->add_option("--out", pr.out, "proof file to write")->required();

    VerifyOptions vf;
    auto* verify = app.add_subcommand("verify", "check a proof file; exit 0 accept, 1 reject, 2 malformed");
    verify->add_option("--keys", vf.keys_dir, "directory with vk.bin")->required();
    verify->add_option("proof", vf.proof, "proof file")->required();

    RunOptions rn;
    auto* run = app.add_subcommand("run", "execute a protocol scenario");
    run->add_option("--scenario", rn.scenario, "scenario JSON")->required();
    run->add_option("--out", rn.out_dir, "artifact directory")->required();
    run->add_option("--seed", rn.seed, "override the scenario seed");
    run->add_option("--format", rn.format, "text or machine");

    InspectOptions in;
    auto* inspect = app.add_subcommand("inspect", "query the artifacts of a run");
    inspect->add_option("--out", in.dir, "artifact directory")->required();
    inspect->add_option("query", in.query, "proofs | records | escrow | sessions | transcript")->required();
    inspect->add_option("--session", in.session, "only rows for this session");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsage;
    }

    if (*keygen) return cmd_keygen(kg, std::cout, std::cerr);
    if (*prove) return cmd_prove(pr, std::cout, std::cerr);
    if (*verify) return cmd_verify(vf, std::cout, std::cerr);
    if (*run) return cmd_run(rn, std::cout, std::cerr);
    return cmd_inspect(in, std::cout, std::cerr);
}
