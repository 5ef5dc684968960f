#pragma once

#include <stdexcept>
#include <string>

namespace tilda {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model configuration rejected (e.g. d not divisible by P, zero field).
struct InvalidConfig : Error {
    using Error::Error;
};

/// Input length does not match the configured dimension.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// Input contains NaN or Inf.
struct NonFiniteInput : Error {
    using Error::Error;
};

/// Prediction requested from a model that has learned nothing.
struct EmptyModel : Error {
    using Error::Error;
};

/// File does not start with the expected magic bytes.
struct BadMagic : Error {
    using Error::Error;
};

/// File carries a recognized family magic but an unsupported version.
struct VersionMismatch : Error {
    using Error::Error;
};

/// File is shorter than its header promises.
struct TruncatedFile : Error {
    using Error::Error;
};

/// File payload is internally inconsistent.
struct CorruptPayload : Error {
    using Error::Error;
};

/// Text input (CSV, label file) failed to parse.
struct ParseError : Error {
    using Error::Error;
};

/// Underlying OS-level read/write failure.
struct IoFailure : Error {
    using Error::Error;
};

/// Scenario cannot run on the given data: empty split, impossible
/// stratification, empty report.
struct ScenarioError : Error {
    using Error::Error;
};

} // namespace tilda
