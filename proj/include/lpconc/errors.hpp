#pragma once

#include <stdexcept>
#include <string>

namespace lpconc {

/// Raised when a quantity is requested outside the region where it is defined,
/// e.g. log-moments of a law with an atom at zero.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed user input: unparseable specs, bad CSV cells, non-finite samples.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lpconc
