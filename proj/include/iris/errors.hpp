#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace iris {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or unusable configuration (missing tools, unwritable workdir, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// External tool exited nonzero in a context where that is not a verdict.
class ToolFailure : public Error {
public:
    ToolFailure(std::string tool, int exit_code, std::string stderr_text)
        : Error(tool + " failed with exit code " + std::to_string(exit_code)),
          tool(std::move(tool)),
          exit_code(exit_code),
          stderr_text(std::move(stderr_text)) {}

    std::string tool;
    int exit_code;
    std::string stderr_text;
};

// Tool exited 0 but the expected dump/artifact is not there.
class DumpMissing : public Error {
public:
    using Error::Error;
};

class Timeout : public Error {
public:
    using Error::Error;
};

// Candidate IR rejected by the LLVM backend compiler; the "does not compile" verdict.
class IrRejected : public Error {
public:
    explicit IrRejected(std::string diagnostics)
        : Error("candidate IR rejected"), diagnostics(std::move(diagnostics)) {}

    std::string diagnostics;
};

class LinkFailure : public Error {
public:
    explicit LinkFailure(std::string diagnostics)
        : Error("link failed"), diagnostics(std::move(diagnostics)) {}

    std::string diagnostics;
};

class UnbalancedBraces : public Error {
public:
    UnbalancedBraces(std::size_t offset, const std::string& what)
        : Error(what + " (offset " + std::to_string(offset) + ")"), offset(offset) {}

    std::size_t offset;
};

class EmptyDump : public Error {
public:
    using Error::Error;
};

class EmptyModule : public Error {
public:
    using Error::Error;
};

class DuplicateSymbol : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class UnknownSchema : public Error {
public:
    using Error::Error;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line_number, const std::string& what)
        : Error("line " + std::to_string(line_number) + ": " + what),
          line_number(line_number) {}

    std::size_t line_number;
};

class BuildRejected : public Error {
public:
    enum class Side { gimple, llvm, both };

    BuildRejected(Side side, std::string diagnostics)
        : Error("sample rejected at corpus build"), side(side),
          diagnostics(std::move(diagnostics)) {}

    Side side;
    std::string diagnostics;
};

class BackendUnavailable : public Error {
public:
    using Error::Error;
};

class SampleUnknown : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

} // namespace iris
