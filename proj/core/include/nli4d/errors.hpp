#pragma once

#include <stdexcept>
#include <string>

namespace nli4d {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- constellation ---------------------------------------------------------

// A data line of a constellation file did not contain exactly four finite
// real numbers.
struct MalformedLine : Error {
    int line_no;
    explicit MalformedLine(int n, const std::string& what)
        : Error("line " + std::to_string(n) + ": " + what), line_no(n) {}
};

// Fewer than two points after parsing - a one-point "constellation" carries
// no information and breaks every moment ratio.
struct TooFewPoints : Error {
    using Error::Error;
};

// Mean power of the constellation is zero; it cannot be rescaled.
struct ZeroPowerConstellation : Error {
    using Error::Error;
};

// One polarization carries no power, so the per-polarization moment ratios
// are undefined.
struct ZeroPolarizationPower : Error {
    using Error::Error;
};

// moment_table_oracle() was handed an index pattern outside the supported
// tables.
struct UnknownPattern : Error {
    using Error::Error;
};

// ---- integrator ------------------------------------------------------------

struct BudgetTooSmall : Error {
    using Error::Error;
};

// An NLI evaluation needed an integral that the supplied set does not hold.
struct MissingIntegral : Error {
    using Error::Error;
};

// ---- split-step simulator --------------------------------------------------

// The WDM grid does not fit (or align with) the simulated spectral window.
struct GridTooWide : Error {
    using Error::Error;
};

// Adaptive step control drove the step below the sanity floor (1 m).
struct StepUnderflow : Error {
    using Error::Error;
};

// Too few occurrences of some constellation point to form reliable
// conditional means at the receiver.
struct InsufficientSymbolsPerPoint : Error {
    using Error::Error;
};

// ---- model/reporting -------------------------------------------------------

// SNR denominator is zero (no ASE and no NLI).
struct DegenerateDenominator : Error {
    using Error::Error;
};

// Configuration file missing, malformed, inconsistent, or with unknown keys.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace nli4d
