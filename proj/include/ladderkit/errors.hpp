#pragma once

#include <stdexcept>
#include <string>

namespace ladderkit {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad configuration, violated precondition, out-of-range
// level or index. Maps to exit code 2 at the CLI.
class InputError : public Error {
public:
    using Error::Error;
};

// A numerical check ran and failed (positivity, residual above tolerance,
// singular pivot). Maps to exit code 1 at the CLI.
class CheckError : public Error {
public:
    using Error::Error;
};

}  // namespace ladderkit
