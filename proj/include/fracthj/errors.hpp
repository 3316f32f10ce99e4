#pragma once

#include <stdexcept>
#include <string>

namespace fracthj {

/// Invalid or inconsistent problem/experiment configuration.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A time-stepping solve exceeded the blowup guard.
struct stability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Explicit advection step too large for the positivity-preserving update.
struct step_restriction_error : std::runtime_error {
    step_restriction_error(const std::string& msg, double admissible)
        : std::runtime_error(msg), admissible_dt(admissible) {}
    double admissible_dt;
};

}  // namespace fracthj
