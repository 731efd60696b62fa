#pragma once

#include <stdexcept>
#include <string>

namespace iwa {

// Inverting a non-unit (valuation > 0, or zero at working precision).
struct NonUnitInverse : std::runtime_error {
    explicit NonUnitInverse(const std::string& what) : std::runtime_error(what) {}
};

// An operation would leave no certified digits (precision ledger hit zero).
struct PrecisionExhausted : std::runtime_error {
    explicit PrecisionExhausted(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the convergence domain of log/exp (or a series evaluation
// outside the open unit disk).
struct ConvergenceDomain : std::runtime_error {
    explicit ConvergenceDomain(const std::string& what) : std::runtime_error(what) {}
};

// A quantity the caller asked us to certify cannot be certified at the working
// precision/truncation (e.g. Weierstrass data when every coefficient is
// divisible by p^m, or a p-primary part with a full-precision diagonal entry).
struct Indeterminate : std::runtime_error {
    explicit Indeterminate(const std::string& what) : std::runtime_error(what) {}
};

// A hard size limit was exceeded (e.g. Bernoulli index past the supported
// range); raising the limit is a code change, not a runtime knob.
struct BoundExceeded : std::runtime_error {
    explicit BoundExceeded(const std::string& what) : std::runtime_error(what) {}
};

// An interpolation value of the p-adic L-function was requested for an odd
// character (the odd branch is identically zero and never what a caller
// wants; asking for it is a logic error upstream).
struct OddCharacter : std::runtime_error {
    explicit OddCharacter(const std::string& what) : std::runtime_error(what) {}
};

} // namespace iwa
