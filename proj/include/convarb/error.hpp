#pragma once

#include <stdexcept>
#include <string>

namespace convarb {

/// Invalid argument or parameter outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An operation was called on data that does not satisfy its precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A module output broke one of its own invariants (corrupted model data).
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A construction was refused for a stated reason (e.g. the density when C1 fails).
class ConstructionRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace convarb
