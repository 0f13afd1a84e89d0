#pragma once

#include <stdexcept>
#include <string>

namespace lcft {

// Base of all library failures. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }
    virtual int exit_code() const noexcept { return 3; }

private:
    std::string kind_;
};

// Bad user input (exit code 2).
class InputError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// Numerical guard tripped (exit code 3).
class GuardError : public Error {
public:
    using Error::Error;
};

#define LCFT_DEFINE_ERROR(Name, Base)                                          \
    class Name : public Base {                                                 \
    public:                                                                    \
        explicit Name(const std::string& what) : Base(#Name, what) {}          \
    };

LCFT_DEFINE_ERROR(ValidationError, InputError)
LCFT_DEFINE_ERROR(DomainError, InputError)
LCFT_DEFINE_ERROR(GraphInvalid, InputError)
LCFT_DEFINE_ERROR(DimensionMismatch, InputError)
LCFT_DEFINE_ERROR(PoleError, GuardError)
LCFT_DEFINE_ERROR(BudgetExceeded, GuardError)
LCFT_DEFINE_ERROR(ConsistencyError, GuardError)
LCFT_DEFINE_ERROR(NearPole, GuardError)
LCFT_DEFINE_ERROR(DegenerateWeight, GuardError)
LCFT_DEFINE_ERROR(CostGuard, GuardError)
LCFT_DEFINE_ERROR(SingularPoint, GuardError)

#undef LCFT_DEFINE_ERROR

}  // namespace lcft
