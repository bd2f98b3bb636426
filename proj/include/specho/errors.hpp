#pragma once

#include <stdexcept>
#include <string>

namespace specho {

// Exit-code families used by the CLI:
//   0 ok, 2 assumption violation, 3 precision/resolution, 4 usage.
enum class ExitCode : int {
    ok = 0,
    internal = 1,
    assumption_violation = 2,
    precision = 3,
    usage = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

// Unknown catalog id, missing file, missing artifact.
class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(ExitCode::usage, what) {}
};

// Bad arguments, malformed config, violated preconditions of the "caller got it wrong" kind.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

// Degenerate critical point, resonant/symmetric system, inconsistent component
// counts: the mathematical hypotheses of the reconstruction are not met.
class AssumptionError : public Error {
public:
    explicit AssumptionError(const std::string& what)
        : Error(ExitCode::assumption_violation, what) {}
};

// Quadrature non-convergence, Richardson failure, ill-conditioned fits,
// insufficient statistics: the numbers cannot be trusted at the requested tolerance.
class PrecisionError : public Error {
public:
    explicit PrecisionError(const std::string& what) : Error(ExitCode::precision, what) {}
};

} // namespace specho
