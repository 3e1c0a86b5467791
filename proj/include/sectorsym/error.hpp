#pragma once

#include <stdexcept>
#include <string>

namespace sectorsym {

enum class ErrorCode {
    invalid_argument,
    domain_violation,
    root_bracket,
    degenerate,
    point_outside,
    mesh_failure,
    singular_system,
    divergence,
    no_convergence,
    io,
    parse,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sectorsym
