#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace setix {

/// Caller violated an API contract (bad parameter, mismatched layouts, ...).
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A value does not fit the field or range it is destined for.
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain of an operation (e.g. msb of 0).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class NotFoundError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DuplicateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A bounded-size set would reach its cap.
class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace setix
