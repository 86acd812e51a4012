#pragma once

#include <stdexcept>
#include <string>

namespace laftr {

// Base of every error raised by the library. `kind()` is the machine-readable
// tag the CLI reports on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error("rejected-input", message) {}
};

class InputNotFoundError : public Error {
public:
    explicit InputNotFoundError(const std::string& message)
        : Error("input-not-found", message) {}
};

class InternalStateError : public Error {
public:
    explicit InternalStateError(const std::string& message)
        : Error("internal-state", message) {}
};

// Raised when a gradient or loss stops being finite; `where()` names the
// parameter path or training position.
class NonFiniteError : public Error {
public:
    NonFiniteError(std::string where, const std::string& message)
        : Error("non-finite", message), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

class MetricUndefinedError : public Error {
public:
    explicit MetricUndefinedError(const std::string& message)
        : Error("metric-undefined", message) {}
};

class GroupStarvationError : public Error {
public:
    explicit GroupStarvationError(const std::string& message)
        : Error("group-starvation", message) {}
};

class TheoremViolationError : public Error {
public:
    explicit TheoremViolationError(const std::string& message)
        : Error("theorem-violation", message) {}
};

class SelectionError : public Error {
public:
    explicit SelectionError(const std::string& message) : Error("selection", message) {}
};

}  // namespace laftr
