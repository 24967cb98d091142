#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gel {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function (log of a non-positive value, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Precondition or invariant violated by the caller.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. The message carries the file and line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Evaluation metric is undefined for the given labels.
class MetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or gradient.
class NumericalAbort : public std::runtime_error {
public:
    NumericalAbort(std::size_t epoch, const std::string& term)
        : std::runtime_error("non-finite value at epoch " + std::to_string(epoch) + " in " + term),
          epoch_(epoch), term_(term) {}

    std::size_t epoch() const noexcept { return epoch_; }
    const std::string& term() const noexcept { return term_; }

private:
    std::size_t epoch_;
    std::string term_;
};

} // namespace gel
