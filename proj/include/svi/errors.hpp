#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace svi {

// Bad argument values or dimension mismatches.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The configuration lies outside the parameter region where the method is defined.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An oracle was asked for something it cannot do (e.g. shared-seed evaluation).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A caller-side precondition was detectably violated.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Aggregates every problem found while validating a document.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out = "invalid experiment spec:";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace svi
