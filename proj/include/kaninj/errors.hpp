#pragma once

#include <stdexcept>
#include <string>

namespace kaninj {

// Base for every error the library raises on bad input or exhausted budgets.
// Internal invariant breaches use std::logic_error instead.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateElementError : Error {
    using Error::Error;
};

// Antisymmetry failure: the declared order relates two elements both ways.
struct CycleError : Error {
    using Error::Error;
};

struct NotParallelError : Error {
    using Error::Error;
};

struct DomainMismatchError : Error {
    using Error::Error;
};

struct BaseMismatchError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct BudgetExceededError : Error {
    using Error::Error;
};

struct NotConvergedError : Error {
    using Error::Error;
};

struct TargetNotInjectiveError : Error {
    using Error::Error;
};

struct UnknownCommandError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, int line, int column)
        : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line(line),
          column(column) {}
    int line;
    int column;
};

}  // namespace kaninj
