#pragma once

#include <stdexcept>
#include <string>

namespace rml {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

// Parameter outside the admissible range (exponents, t, lambda).
class RangeError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Grid too coarse for the requested frequency.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, double max_admissible)
      : Error(what), max_admissible_(max_admissible) {}
  double max_admissible() const { return max_admissible_; }

 private:
  double max_admissible_;
};

}  // namespace rml
