#pragma once

#include <stdexcept>
#include <string>

namespace rsched {

/// Out-of-range generator or configuration parameter.
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed instance or schedule text. `field()` names the offending entry.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string field, const std::string &what)
        : std::runtime_error("parse error in '" + field + "': " + what), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

class VersionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An instance or schedule failed its invariants.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation precondition (illegal schedule, unranked individual, ...).
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// The graph structure makes the request impossible (cycle, deadlock).
class StructuralError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Instance exceeds the exhaustive-enumeration guard.
class SizeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace rsched
