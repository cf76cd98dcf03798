#pragma once

#include <stdexcept>

namespace soliton {

/// Invalid argument or precondition violation (bad charge, grid mismatch, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation ran but failed numerically (blow-up, collapse, no convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a data file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace soliton
