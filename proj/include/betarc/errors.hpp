#pragma once

#include <stdexcept>
#include <string>

namespace betarc {

/// Argument outside the domain of a map, distribution or link.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent dimensions or malformed input data.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that cannot produce a meaningful number (zero variance,
/// unavailable closed form, optimizer breakdown).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace betarc
