#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace steklov {

/// A documented precondition was violated by the caller's input.
/// The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string module, const std::string& what)
      : std::invalid_argument(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// The computation itself failed (singular solve, vanishing boundary value,
/// non-convergence). The CLI maps this to exit status 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace steklov
