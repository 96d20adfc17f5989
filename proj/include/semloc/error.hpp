#pragma once

#include <stdexcept>
#include <string>

namespace semloc {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
    input,      // unreadable or malformed files, bad parameter values (exit 1)
    backend,    // model backend failures: fixture misses, HTTP errors (exit 2)
    invariant,  // violated internal contracts, degenerate results (exit 3)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::input: return 1;
            case ErrorKind::backend: return 2;
            case ErrorKind::invariant: return 3;
        }
        return 3;
    }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error(ErrorKind::input, message) {}
};

class BackendError : public Error {
public:
    explicit BackendError(const std::string& message) : Error(ErrorKind::backend, message) {}
};

class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& message) : Error(ErrorKind::invariant, message) {}
};

}  // namespace semloc
