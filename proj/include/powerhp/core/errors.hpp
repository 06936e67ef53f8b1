#pragma once

#include <stdexcept>
#include <string>

namespace powerhp {

// Invalid configuration: bad hyperparameters, shape mismatches, malformed files.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the mathematical domain of an operation (e.g. a zero reference norm).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A trial cannot continue: non-finite iterate, fitness or gradient, or an exponent
// beyond the configured safety bound.
class AbortError : public std::runtime_error {
 public:
  explicit AbortError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace powerhp
