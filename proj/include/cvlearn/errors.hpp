#pragma once

#include <stdexcept>
#include <string>

namespace cvlearn {

/// Matrix/vector dimensions inconsistent with the declared mode count.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// A matrix that must be inverted is singular or too ill-conditioned.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double condition_number)
      : std::runtime_error(what), condition_number(condition_number) {}
  double condition_number;
};

/// An object violates its physical validity conditions.
class InvalidObjectError : public std::runtime_error {
 public:
  explicit InvalidObjectError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested truncation is too small for the requested accuracy.
class CutoffError : public std::runtime_error {
 public:
  CutoffError(const std::string& what, int suggested_cutoff)
      : std::runtime_error(what), suggested_cutoff(suggested_cutoff) {}
  int suggested_cutoff;
};

/// Configuration file failed schema validation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cvlearn
