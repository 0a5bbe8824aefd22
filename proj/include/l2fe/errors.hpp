#pragma once

#include <stdexcept>
#include <string>

namespace l2fe {

// Base class for all validation errors raised by the toolkit. I/O failures
// use IoError so the CLI can map the two families to distinct exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};
struct ZeroNorm : Error {
    using Error::Error;
};
struct InvalidDimension : Error {
    using Error::Error;
};
struct InvalidSpec : Error {
    using Error::Error;
};
struct InvalidParameter : Error {
    using Error::Error;
};
struct InvalidInput : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct RankDeficient : Error {
    using Error::Error;
};
struct NotInLattice : Error {
    using Error::Error;
};
struct InfeasibleBoost : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct DegenerateMatrix : Error {
    using Error::Error;
};
struct UnsupportedScheme : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct DuplicateUser : Error {
    using Error::Error;
};
struct UnknownUser : Error {
    using Error::Error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace l2fe
