#pragma once

#include <stdexcept>
#include <string>

namespace opgfn {

// Caller broke a documented precondition (illegal action, empty batch, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A configuration value is missing, unknown or inconsistent.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The request is well formed but cannot be served by this environment
// (e.g. exhaustive enumeration of a space above the enumeration cap).
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numeric precondition of a closed-form construction does not hold.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace opgfn
