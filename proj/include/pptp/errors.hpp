#pragma once

#include <stdexcept>
#include <string>

namespace pptp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed serialized input (truncated buffer, bad encoding, trailing bytes).
struct ParseError : Error {
    using Error::Error;
};

// A parameter outside the supported envelope (security level, bit widths, ...).
struct UnsupportedParameter : Error {
    using Error::Error;
};

// Prover was asked to prove a false range statement.
struct WitnessOutOfRange : Error {
    using Error::Error;
};

// Prover was handed a commitment that does not open to the given witness.
struct CommitmentMismatch : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct BoardError : Error {
    using Error::Error;
};

struct NetError : Error {
    using Error::Error;
};

}  // namespace pptp
