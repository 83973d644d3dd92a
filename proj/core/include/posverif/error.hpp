#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posverif {

enum class Errc {
    CapacityExceeded,
    DuplicateRegister,
    UnknownRegister,
    LengthMismatch,
    InvalidN,
    WrongStateShape,
    TagMismatch,
    RegisterViolation,
    InvalidTrials,
    SimulationStarted,
    Overflow,
    ConfigInvalid,
    BudgetExceeded,
    NotClassicalTape,
    KTooLarge,
    UnknownAttack,
    UnknownStrategy,
    DecodeError,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace posverif
