#pragma once

#include <stdexcept>
#include <string>

namespace ucalc {

/// Base error. exit_code() matches the CLI contract:
/// 0 ok, 2 parse, 3 characteristic, 4 precision, 5 suite failure, 1 anything else.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const { return 1; }
  virtual const char* kind() const { return "error"; }
};

class DomainError : public Error {
public:
  using Error::Error;
  const char* kind() const override { return "domain"; }
};

class ParseError : public Error {
public:
  ParseError(int line, int col, const std::string& msg)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int exit_code() const override { return 2; }
  const char* kind() const override { return "parse"; }
  int line() const { return line_; }
  int column() const { return col_; }

private:
  int line_;
  int col_;
};

/// Raised when an operation needs an integer that is 0 in residue characteristic,
/// e.g. j! or a basis level n >= p over F_p[[t]].
class CharacteristicViolation : public Error {
public:
  using Error::Error;
  int exit_code() const override { return 3; }
  const char* kind() const override { return "characteristic"; }
};

/// Raised when a result would have no significant digits left, or when an
/// operation would need to divide by a value indistinguishable from zero.
class PrecisionExhausted : public Error {
public:
  using Error::Error;
  int exit_code() const override { return 4; }
  const char* kind() const override { return "precision"; }
};

class UnsupportedDegree : public Error {
public:
  using Error::Error;
  const char* kind() const override { return "unsupported-degree"; }
};

class UnsupportedLevel : public Error {
public:
  using Error::Error;
  const char* kind() const override { return "unsupported-level"; }
};

class BudgetExceeded : public Error {
public:
  using Error::Error;
  const char* kind() const override { return "budget"; }
};

class NoConvergence : public Error {
public:
  using Error::Error;
  const char* kind() const override { return "no-convergence"; }
};

}  // namespace ucalc
