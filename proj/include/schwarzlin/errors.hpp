#pragma once

#include <stdexcept>
#include <string>

namespace schwarzlin {

enum class Errc {
    invalid_mesh,
    incompatible_meshes,
    coloring_violation,
    covering_error,
    numeric_overflow,
    unsupported_operation,
    convexity_violation,
    line_search_failure,
    max_iterations,
    missing_coarse,
    insufficient_data,
    algorithmic_regression,
    usage,
    io,
};

const char* errc_name(Errc c);

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace schwarzlin
