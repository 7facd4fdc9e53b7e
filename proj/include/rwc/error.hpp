#pragma once

#include <stdexcept>
#include <string>

namespace rwc {

/// Precondition or argument outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid generator, solver or run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A choice model cannot produce a distribution for the given context.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Logit training diverged.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or mismatched artifact file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rwc
