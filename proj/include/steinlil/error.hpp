#pragma once

#include <stdexcept>
#include <string>

namespace steinlil {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested quantity does not exist in this dependence regime
/// (divergent series, non-critical order, ...).
class RegimeError : public Error {
public:
    using Error::Error;
};

/// A lag or index lies outside the data a model or path can supply.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// The circulant embedding has a genuinely negative eigenvalue.
class EmbeddingError : public Error {
public:
    EmbeddingError(const std::string& what, double most_negative, std::size_t embedding_size)
        : Error(what), most_negative_(most_negative), embedding_size_(embedding_size) {}

    double most_negative() const noexcept { return most_negative_; }
    std::size_t embedding_size() const noexcept { return embedding_size_; }

private:
    double most_negative_;
    std::size_t embedding_size_;
};

/// A computation would exceed its configured cost cap.
class CostCapError : public Error {
public:
    using Error::Error;
};

/// An index or exponent does not fit into the supported integer range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// A numerical evaluation failed (underflow, non-convergence).
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace steinlil
