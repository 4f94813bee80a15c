#pragma once

#include <stdexcept>
#include <string>

namespace nonlocal {

// Every error carries a short machine-readable code; what() is the human text.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define NONLOCAL_ERROR(Name, Code)                                     \
    struct Name : Error {                                              \
        explicit Name(const std::string& msg) : Error(Code, msg) {}    \
    }

NONLOCAL_ERROR(DomainError, "domain");
NONLOCAL_ERROR(ParameterError, "parameter");
NONLOCAL_ERROR(QuadratureError, "quadrature");
NONLOCAL_ERROR(SizeError, "size");
NONLOCAL_ERROR(LatticeError, "invalid-lattice");
NONLOCAL_ERROR(ConvergenceError, "convergence");
NONLOCAL_ERROR(InvariantError, "invariant");
NONLOCAL_ERROR(EnvelopeError, "envelope");
NONLOCAL_ERROR(EventCapError, "event-cap");
NONLOCAL_ERROR(RejectionError, "rejection-overflow");
NONLOCAL_ERROR(ConfigError, "config");
NONLOCAL_ERROR(IoError, "io");

#undef NONLOCAL_ERROR

}  // namespace nonlocal
