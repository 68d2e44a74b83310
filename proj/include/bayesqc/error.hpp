#pragma once

#include <stdexcept>
#include <string>

namespace bayesqc {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
    Ok = 0,
    InputError = 2,
    ConfigError = 3,
    DomainError = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Malformed input file: missing column, unreadable stream.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(ExitCode::InputError, what) {}
};

// Inconsistent run configuration, e.g. a weld type with no posterior.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::ConfigError, what) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ExitCode::DomainError, what) {}
};

}  // namespace bayesqc
