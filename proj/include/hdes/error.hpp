#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdes {

/// Violated precondition: wrong lengths, out-of-range indices, bad configuration.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mathematical domain violation (non-finite input, unsupported order).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Failure while evaluating an expression (division by zero, non-finite result).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problem-file error carrying a source position. what() reads "line:col: message".
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

}  // namespace hdes
