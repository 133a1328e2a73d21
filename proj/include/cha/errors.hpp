#pragma once

#include <stdexcept>
#include <string>

namespace cha {

enum class ErrorKind {
    domain,          // argument outside the mathematical domain
    precision_loss,  // internal error estimate exceeded tolerance
    convergence,     // iteration / bracketing / refinement did not converge
    resolution,      // grid could not certify the result (node count, rule agreement)
    cutoff,          // momentum cutoff ladder exhausted
    validation,      // malformed user input
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::precision_loss: return "precision_loss";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::resolution: return "resolution";
        case ErrorKind::cutoff: return "cutoff";
        case ErrorKind::validation: return "validation";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};
struct PrecisionLossError : Error {
    explicit PrecisionLossError(const std::string& what) : Error(ErrorKind::precision_loss, what) {}
};
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& what) : Error(ErrorKind::convergence, what) {}
};
struct ResolutionError : Error {
    explicit ResolutionError(const std::string& what) : Error(ErrorKind::resolution, what) {}
};
struct CutoffError : Error {
    explicit CutoffError(const std::string& what) : Error(ErrorKind::cutoff, what) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Process exit code for the CLI: 2 for bad input, 3 for numerical failure.
inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::domain:
        case ErrorKind::validation: return 2;
        default: return 3;
    }
}

}  // namespace cha
