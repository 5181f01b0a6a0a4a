#pragma once

#include <stdexcept>
#include <string>

namespace floodrisk {

// Invalid distribution parameters or arguments outside a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (negative cv, even node counts, bad boxes...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Data that parses but violates dataset invariants.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Root-finding or other numeric failure.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace floodrisk
