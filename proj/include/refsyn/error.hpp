#pragma once

#include <stdexcept>
#include <string>

namespace refsyn {

/// Caller violated an operation's precondition (bad ids, mismatched
/// managers, width mismatches, ...).
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration file or system description failed validation.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace refsyn
