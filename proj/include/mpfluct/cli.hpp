#pragma once

#include "mpfluct/montecarlo.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace mpfluct::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kPass = 0, kVerdictFail = 1, kConfigError = 2, kNumericError = 3 };

/// Parses argv, runs one subcommand and returns the process exit code.
int cli_main(int argc, char** argv);

/// statistic,estimate,std_error,reference,verdict with 17 significant digits.
std::string results_csv(const montecarlo::ResultTable& table);
std::string format_double(double value);
std::string csv_field(std::string_view text);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace mpfluct::cli
