#pragma once

#include <stdexcept>
#include <string>

namespace iltlab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something outside an operation's domain (bad radius, a set the
// oracle cannot cover, an inconsistent occupation, ...). The CLI maps this to exit 2.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed to meet its tolerance. The CLI maps this to exit 3.
class NumericFailure : public Error {
 public:
  NumericFailure(std::string module, const std::string& what)
      : Error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace iltlab
