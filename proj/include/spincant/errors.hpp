#pragma once

#include <stdexcept>
#include <string>

namespace spincant {

/// Input outside the mathematical domain of a model quantity.
/// `field()` names the offending input.
class DomainError : public std::invalid_argument {
public:
  DomainError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// beta >= 2: the overdamped branch has no closed form here.
class UnsupportedRegimeError : public DomainError {
public:
  using DomainError::DomainError;
};

/// A requested grid or sweep exceeds the configured cap.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical integration failed its step-halving self check.
class AccuracyError : public std::runtime_error {
public:
  AccuracyError(const std::string& what, double measured_order)
      : std::runtime_error(what), measured_order_(measured_order) {}
  double measured_order() const noexcept { return measured_order_; }

private:
  double measured_order_;
};

/// The explicit grid solver blew up.
class InstabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace spincant
