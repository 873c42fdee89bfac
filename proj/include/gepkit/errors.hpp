#pragma once

#include <stdexcept>
#include <string>

namespace gepkit {

/// Base class for all gepkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct NotSymmetric : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct NotPSD : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct RankDeficient : Error {
    using Error::Error;
};

struct BadK : Error {
    using Error::Error;
};

struct BadLambda : Error {
    using Error::Error;
};

struct ZeroVector : Error {
    using Error::Error;
};

struct HypothesisViolated : Error {
    using Error::Error;
};

struct NotOrthonormal : Error {
    using Error::Error;
};

struct NotBOrthonormal : Error {
    using Error::Error;
};

struct Diverged : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct BadSpectrumSpec : Error {
    using Error::Error;
};

}  // namespace gepkit
