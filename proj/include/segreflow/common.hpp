#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace segreflow {

// Error taxonomy. The CLI maps these to exit codes:
//   config_error -> 2, numerical_error -> 3, invariant_error -> 4.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& msg) : std::runtime_error(msg) {}
};

using rng_t = std::mt19937_64;

// Log levels, selected via the SEGREFLOW_LOG environment variable
// (quiet | info | trace). Default is quiet.
enum class log_level { quiet = 0, info = 1, trace = 2 };

log_level current_log_level();
void log_info(const std::string& msg);
void log_trace(const std::string& msg);

}  // namespace segreflow
