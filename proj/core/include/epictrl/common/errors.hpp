#ifndef EPICTRL_COMMON_ERRORS_HPP
#define EPICTRL_COMMON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epictrl {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid value passed to an operation (non-finite input, out-of-range argument).
struct DomainError : Error {
    using Error::Error;
};

/// A daily series does not cover the requested horizon or date range.
struct CoverageError : Error {
    using Error::Error;
};

/// Two series expected on the same daily grid do not line up.
struct AlignmentError : Error {
    using Error::Error;
};

/// Optimizer could not produce a usable result (bad seed, divergence).
struct FitError : Error {
    using Error::Error;
};

/// Malformed input file (missing header, bad row, duplicate key).
struct ParseError : Error {
    using Error::Error;
};

/// Requested key (country code, column) absent from an input file.
struct LookupError : Error {
    using Error::Error;
};

/// Environment used before configuration, or invalid configuration file.
struct ConfigError : Error {
    using Error::Error;
};

/// step() called on a finished episode.
struct EpisodeError : Error {
    using Error::Error;
};

/// Non-finite values coming out of a learned model.
struct ModelHealthError : Error {
    using Error::Error;
};

} // namespace epictrl

#endif
