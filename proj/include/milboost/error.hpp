#ifndef MILBOOST_ERROR_HPP
#define MILBOOST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mil {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, non-finite values, invalid parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to produce a usable answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File ingestion problems; carries the offending line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

}  // namespace mil

#endif  // MILBOOST_ERROR_HPP
