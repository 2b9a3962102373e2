#pragma once

#include <stdexcept>
#include <string>

namespace medchain {

/// Failure categories used across the library. Tests match on the kind,
/// messages carry the stage and the offending field or index.
enum class ErrorKind {
    Parameter,   // caller passed an out-of-contract argument
    Domain,      // value outside the operation's domain
    Config,      // inconsistent configuration (chunk width vs. modulus, ...)
    Corruption,  // malformed or internally inconsistent data
    WrongKey,    // decryption key does not match the container
    Tamper,      // persisted chain state fails verification
    Version,     // unknown container or file format version
    Io,          // filesystem failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Config: return "config";
        case ErrorKind::Corruption: return "corruption";
        case ErrorKind::WrongKey: return "wrong-key";
        case ErrorKind::Tamper: return "tamper";
        case ErrorKind::Version: return "version";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace medchain
