#pragma once

#include <stdexcept>
#include <string>

namespace fracsol {

/// Failure categories; the CLI maps them to exit codes 2, 3 and 4.
enum class ErrorKind { validation, convergence, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& what) {
    throw Error(ErrorKind::validation, what);
}

}  // namespace fracsol
