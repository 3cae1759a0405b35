#ifndef DITCACHE_ERRORS_HPP_
#define DITCACHE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ditcache {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct ZeroDenominator : Error {
    using Error::Error;
};

struct OddDimension : Error {
    using Error::Error;
};

struct BadRange : Error {
    using Error::Error;
};

struct BadInterval : Error {
    using Error::Error;
};

struct NoCachedResidual : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct DegenerateDesign : Error {
    using Error::Error;
};

struct DegenerateVariance : Error {
    using Error::Error;
};

struct GridTooSmall : Error {
    using Error::Error;
};

struct MissingRescaler : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace ditcache

#endif  // DITCACHE_ERRORS_HPP_
