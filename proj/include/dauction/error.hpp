#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dauction {

// Precondition violated by the caller (bad bid, out-of-range id, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Instance generator could not satisfy the requested (K*, gap) within its draw budget.
class InfeasibleSpec : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance violates a strict-gap assumption of a theory bound (zero or negative denominator).
class DegenerateInstance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carries every validation failure of a config document, not only the first.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace dauction
