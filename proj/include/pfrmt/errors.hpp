#pragma once

#include <stdexcept>
#include <string>

namespace pfrmt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct SingularMatrixError : Error {
    double rcond;
    SingularMatrixError(const std::string& msg, double rc) : Error(msg), rcond(rc) {}
};

struct DegenerateShiftError : Error {
    using Error::Error;
};

struct UnsupportedReductionError : Error {
    using Error::Error;
};

struct DivergentMomentError : Error {
    using Error::Error;
};

struct OnSupportError : Error {
    using Error::Error;
};

struct BudgetError : Error {
    using Error::Error;
};

struct UnsupportedOracleError : Error {
    using Error::Error;
};

struct RegimeError : Error {
    using Error::Error;
};

struct BreakdownError : Error {
    int step;
    BreakdownError(const std::string& msg, int at) : Error(msg), step(at) {}
};

// Config validation failure; `field` is the JSON path of the offending entry.
struct ConfigError : Error {
    std::string field;
    ConfigError(const std::string& msg, std::string f) : Error(msg), field(std::move(f)) {}
};

} // namespace pfrmt
