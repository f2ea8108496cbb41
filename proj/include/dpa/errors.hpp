#pragma once

#include <stdexcept>
#include <string>

namespace dpa {

// Bad inputs: malformed specs, out-of-domain prices, inconsistent sizes.
// The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical precondition failures at runtime; CLI exit code 1.
class MathError : public std::runtime_error {
 public:
  explicit MathError(const std::string& what) : std::runtime_error(what) {}
};

class SingularityError : public MathError {
 public:
  explicit SingularityError(const std::string& what) : MathError(what) {}
};

class NonInvertibleError : public MathError {
 public:
  explicit NonInvertibleError(const std::string& what) : MathError(what) {}
};

class RangeError : public MathError {
 public:
  explicit RangeError(const std::string& what) : MathError(what) {}
};

class RegularityError : public MathError {
 public:
  explicit RegularityError(const std::string& what) : MathError(what) {}
};

}  // namespace dpa
