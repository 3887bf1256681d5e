#pragma once

#include <stdexcept>
#include <string>

namespace popcomp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

// A split policy that cannot be satisfied by the data pool,
// or a resampling input with too few units.
struct SizingError : Error {
    using Error::Error;
};

// Caller violated an API precondition (mixed arms, mismatched pairs, ...).
struct ContractError : Error {
    using Error::Error;
};

// Exhaustive enumeration would exceed the configured budget.
struct BudgetError : Error {
    using Error::Error;
};

// Unknown executor, unknown method value, or a failure inside an executor.
struct ExecutorError : Error {
    using Error::Error;
};

} // namespace popcomp
