#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stitkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the formula parser; position is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Raised by the line-oriented readers (models, derivations); line is 1-based.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace stitkit
