#pragma once

#include <stdexcept>
#include <string>

namespace eemimo {

// Base of every error the library throws. The CLI maps ConfigError to exit
// code 2 and everything else to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input value violates a documented invariant (bad hardware profile, bad
// propagation model, M < K, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The problem has no finite optimum (e.g. zero per-antenna circuit cost).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// No feasible point satisfies the constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace eemimo
