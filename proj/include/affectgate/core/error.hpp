#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace affectgate {

// Raised for malformed or invariant-violating input data (files, logs,
// request bodies). Programming errors use std::invalid_argument /
// std::logic_error instead.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A DataError tied to a 1-based line in a line-oriented input.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& message)
      : DataError("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

  std::size_t line() const noexcept { return line_; }
  // The message without the "line N: " prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::string message_;
};

}  // namespace affectgate
