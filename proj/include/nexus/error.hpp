#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nexus {

// Base of every exception thrown by the library. `kind()` is a short stable
// token used by the CLI for machine-parsable error lines.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// A parameter outside its mathematical domain (shape <= 0, delta > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

// Factorization failure or loss of positive definiteness.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, long minor = -1, long iteration = -1,
                          long group = -1)
      : Error(what), minor_(minor), iteration_(iteration), group_(group) {}
  const char* kind() const noexcept override { return "numerical"; }

  // Leading minor (0-based) at which a Cholesky factorization failed, or -1.
  long minor() const noexcept { return minor_; }
  long iteration() const noexcept { return iteration_; }
  long group() const noexcept { return group_; }

 private:
  long minor_;
  long iteration_;
  long group_;
};

class IngestionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "ingestion"; }
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

}  // namespace nexus
