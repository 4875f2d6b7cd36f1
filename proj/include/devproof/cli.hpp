#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace devproof::cli {

/// Exit codes shared by every subcommand.
enum Exit : int { kOk = 0, kRejected = 1, kUsage = 2 };

struct KeygenOptions {
    std::string firmware;
    std::string out_dir;
    std::uint64_t modulus = 0; // 0 means the runtime prime
    std::uint32_t lambda = 128;
    std::uint32_t bound_inputs = 0;
};

struct ProveOptions {
    std::string keys_dir;
    std::string firmware;
    std::vector<std::int64_t> inputs;
    std::string out;
};

struct VerifyOptions {
    std::string keys_dir;
    std::string proof;
};

struct RunOptions {
    std::string scenario;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
};

struct InspectOptions {
    std::string dir;
    std::string query;
    std::string session;
};

int cmd_keygen(const KeygenOptions& o, std::ostream& out, std::ostream& err);
int cmd_prove(const ProveOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err);
int cmd_inspect(const InspectOptions& o, std::ostream& out, std::ostream& err);

/// Artifact names written by cmd_run.
inline constexpr const char* kTranscript = "transcript.txt";
inline constexpr const char* kLedgerDump = "ledger.txt";
inline constexpr const char* kEscrowTable = "escrow.txt";
inline constexpr const char* kSessions = "sessions.txt";
inline constexpr const char* kMetrics = "metrics.json";

} // namespace devproof::cli
