#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace devproof {

enum class ErrorKind {
    DomainUnavailable,
    ArityError,
    NotInSubgroup,
    NonCausalGate,
    ParseError,
    DegreeError,
    IndexError,
    TooLarge,
    RefuseToProve,
    SequenceError,
    LinkError,
    UnknownKey,
    RangeError,
    InsufficientFunds,
    DuplicateSession,
    UnknownSession,
    StateError,
    Unauthorized,
    EncodingError,
    NotFound,
    ProtocolViolation,
    ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// All recoverable failures in the library are reported through this type;
/// `kind()` is the stable, testable part, `what()` is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Outcome of a verifier. Rejections carry the first failing condition.
struct Verdict {
    bool accepted = false;
    std::string reason;

    static Verdict accept() { return {true, {}}; }
    static Verdict reject(std::string why) { return {false, std::move(why)}; }

    explicit operator bool() const noexcept { return accepted; }
};

} // namespace devproof
