#pragma once

#include <stdexcept>
#include <string>

namespace attrest {

enum class errc {
    degenerate_population,
    zero_mean,
    invalid_design,
    division_by_zero,
    wrong_phase,
    missing_two_phase_factors,
    singular_system,
    nonpositive_mse,
    enumeration_too_large,
    all_replicates_failed,
    invalid_generator_spec,
    mismatched_specs,
    parse_error,
    io_error,
};

/// All library failures are reported as Error with a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

const char* errc_name(errc code) noexcept;

}  // namespace attrest
