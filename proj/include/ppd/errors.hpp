#pragma once

#include <stdexcept>
#include <string>

namespace ppd {

// Bad arguments or contradictory options. CLI maps this to exit code 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Requested bound exceeds the documented exact-arithmetic budget, or an
// intermediate product would not fit 128 bits. Never silently wraps.
// CLI maps this to exit code 3.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint file is unreadable, corrupt, or does not match the requested
// run parameters. CLI maps corrupt/IO to 3 and parameter mismatch to 2.
struct CheckpointError : std::runtime_error {
    enum class Kind { corrupt, mismatch };
    Kind kind;
    CheckpointError(Kind k, const std::string& what)
        : std::runtime_error(what), kind(k) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ppd
