#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pacmc {

// Base of every error raised by the library. Callers that only care about
// "something went wrong in pacmc" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (length mismatch, bad budget...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IntegrationDiverged : public Error {
 public:
  IntegrationDiverged(double time, const std::string& what)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class OutOfHorizon : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ModelDomainError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class SolverStall : public Error {
 public:
  using Error::Error;
};

// The minimax fit needs a tube wider than U_xi.
class BoundInfeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace pacmc
