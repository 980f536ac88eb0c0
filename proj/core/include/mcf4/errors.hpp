#ifndef MCF4_ERRORS_HPP
#define MCF4_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcf4 {

/// Base class for all library errors. Each concrete error carries a stable
/// process exit code so the CLI can map failures to distinct statuses.
class Error : public std::runtime_error {
public:
    Error(std::string message, int exit_code)
        : std::runtime_error(std::move(message)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

#define MCF4_DEFINE_ERROR(Name, Code)                                  \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& msg) : Error(msg, Code) {}    \
    }

// geometry / flow
MCF4_DEFINE_ERROR(DegenerateMetric, 10);
MCF4_DEFINE_ERROR(StepTooLarge, 11);
MCF4_DEFINE_ERROR(SymplecticityLost, 12);
MCF4_DEFINE_ERROR(NoBlowup, 13);

// kernels / densities
MCF4_DEFINE_ERROR(TimeOrder, 20);
MCF4_DEFINE_ERROR(NotSymplectic, 21);
MCF4_DEFINE_ERROR(InsufficientTrace, 22);
MCF4_DEFINE_ERROR(EmptyBall, 23);

// rescaling
MCF4_DEFINE_ERROR(OutOfTraceRange, 30);

// cone analysis
MCF4_DEFINE_ERROR(TooFewPoints, 40);
MCF4_DEFINE_ERROR(NoPlanes, 41);
MCF4_DEFINE_ERROR(EmptyCloud, 42);

// configuration / io
MCF4_DEFINE_ERROR(ParseError, 50);
MCF4_DEFINE_ERROR(ValidationError, 51);
MCF4_DEFINE_ERROR(IOError, 60);
MCF4_DEFINE_ERROR(VersionMismatch, 61);
MCF4_DEFINE_ERROR(LengthMismatch, 62);

#undef MCF4_DEFINE_ERROR

} // namespace mcf4

#endif
