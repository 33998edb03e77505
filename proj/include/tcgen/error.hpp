#pragma once

#include <stdexcept>
#include <string>

namespace tcgen {

/// Process exit codes used by the command line tool.
enum class ExitCode : int {
    ok = 0,
    validation = 2,
    graphability = 3,
    wiring = 4,
    io = 5,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// Malformed input: bad parameters, inconsistent sizes, out-of-range values.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ExitCode::validation, what) {}
};

/// Sequences that cannot be realized as a simple clustered graph.
class GraphabilityError : public Error {
public:
    explicit GraphabilityError(const std::string& what) : Error(ExitCode::graphability, what) {}
};

/// Stub matching gave up (repair budget exhausted or assignment dead end).
class WiringError : public Error {
public:
    explicit WiringError(const std::string& what) : Error(ExitCode::wiring, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

/// Broken internal invariant. Never expected to surface for valid input.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace tcgen
