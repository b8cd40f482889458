#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hamschrod {

/// Root of every error the library raises. `kind()` is the stable type name
/// written into diagnostics and mapped to CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define HAMSCHROD_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    };

// problem_model
HAMSCHROD_DEFINE_ERROR(DomainError)
HAMSCHROD_DEFINE_ERROR(SchemeError)
HAMSCHROD_DEFINE_ERROR(LinearityError)
// ham_engine
HAMSCHROD_DEFINE_ERROR(ConfigError)
HAMSCHROD_DEFINE_ERROR(OrderError)
HAMSCHROD_DEFINE_ERROR(GuessError)
HAMSCHROD_DEFINE_ERROR(DivergenceError)
// backends
HAMSCHROD_DEFINE_ERROR(NaNError)
HAMSCHROD_DEFINE_ERROR(EigenFailure)
HAMSCHROD_DEFINE_ERROR(WrapError)
// convergence_control
HAMSCHROD_DEFINE_ERROR(EmptyCurveError)
HAMSCHROD_DEFINE_ERROR(AllDivergedError)
// cli_runner
HAMSCHROD_DEFINE_ERROR(ParseError)
HAMSCHROD_DEFINE_ERROR(ValidationError)
HAMSCHROD_DEFINE_ERROR(IoError)

#undef HAMSCHROD_DEFINE_ERROR

}  // namespace hamschrod
