#pragma once

#include <stdexcept>
#include <string>

namespace bjac {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPartition : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// An ordering, permutation or split position that violates its domain.
class InvalidOrdering : public Error {
public:
    using Error::Error;
};

class NotAdmissible : public Error {
public:
    using Error::Error;
};

/// A hyperbolic pivot with 2|a_ij| >= a_ii + a_jj: the pair is not positive definite.
class DefinitenessViolation : public Error {
public:
    using Error::Error;
};

class RankDeficiency : public Error {
public:
    using Error::Error;
};

class NotNormal : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// A postcondition that holds as a theorem failed; signals a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace bjac
