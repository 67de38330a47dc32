#pragma once

#include <stdexcept>
#include <string>

namespace renet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Both terminal sets collapsed into one zero-resistance class; potentials
// are undefined even though the effective resistance is 0.
struct SameTerminalClass : Error {
    SameTerminalClass() : Error("terminal sets lie in the same zero-resistance class") {}
};

struct SingularSystem : Error {
    explicit SingularSystem(const std::string& what) : Error("singular system: " + what) {}
};

struct TreeTruncatedBeforeN : Error {
    explicit TreeTruncatedBeforeN(unsigned n)
        : Error("tree was truncated by caps before generation " + std::to_string(n)) {}
};

struct ParamOutOfRange : Error {
    explicit ParamOutOfRange(const std::string& what) : Error("parameter out of range: " + what) {}
};

struct EmptyLaw : Error {
    EmptyLaw() : Error("empirical law holds no samples") {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

}  // namespace renet
