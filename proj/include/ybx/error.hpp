#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ybx {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation hit a vanishing denominator or a removable singular locus.
class SingularPoint : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain (modulus, log of zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// The classifier cannot decide or its two estimates disagree.
class ClassificationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace ybx
