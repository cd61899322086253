#pragma once

#include <stdexcept>
#include <string>

namespace argyris {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. a parameter outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Spline space parameters that violate a construction requirement.
class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// A sampled function could not be reproduced exactly in the requested space.
class NotInSpace : public Error {
public:
    NotInSpace(const std::string& what, double mismatch)
        : Error(what), mismatch_(mismatch) {}
    double mismatch() const { return mismatch_; }

private:
    double mismatch_;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

class NonConformingGeometry : public Error {
public:
    NonConformingGeometry(const std::string& what, double max_gap)
        : Error(what), max_gap_(max_gap) {}
    double max_gap() const { return max_gap_; }

private:
    double max_gap_;
};

class InvalidGeometry : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Interface whose gluing data cannot be chosen linear.
class NotASG1 : public Error {
public:
    NotASG1(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class DegenerateGluing : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double condition_estimate)
        : Error(what), condition_(condition_estimate) {}
    double condition_estimate() const { return condition_; }

private:
    double condition_;
};

class InternalConsistency : public Error {
public:
    using Error::Error;
};

} // namespace argyris
