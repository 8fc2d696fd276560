#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mmblock {

/// Invalid user-supplied parameters. `field()` names the offending input
/// (e.g. "population.height_std_m") so front ends can point at it.
class ValidationError : public std::invalid_argument {
  public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A numerical procedure did not reach its requested accuracy.
class NumericError : public std::runtime_error {
  public:
    NumericError(const std::string& what, double achieved = 0.0)
        : std::runtime_error(what), achieved_(achieved) {}

    /// Accuracy actually reached (meaning depends on the procedure).
    double achieved() const noexcept { return achieved_; }

  private:
    double achieved_;
};

/// No blocker can ever intersect the LoS; callers report zero blockage.
class DegenerateScenario : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace mmblock
