#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edmdr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Raised when an iteration or factorization produces non-finite values or
/// fails to converge. `iteration()` is the solver step where it happened, or
/// zero for factorizations.
class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what, std::size_t iteration = 0)
      : Error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MissingRadius : public Error {
 public:
  explicit MissingRadius(const std::string& element)
      : Error("no Van der Waals radius for element '" + element + "'"),
        element_(element) {}

  const std::string& element() const noexcept { return element_; }

 private:
  std::string element_;
};

}  // namespace edmdr
