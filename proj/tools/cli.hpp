#pragma once

#include "stbem/adaptive.hpp"

#include <optional>
#include <string>

namespace stbem::cli {

/// Either a config to run, or a message and exit code (help, bad flags).
struct ParseResult {
  std::optional<AdaptiveConfig> config;
  int exit_code = 0;
  std::string message;
};

ParseResult parse_args(int argc, const char* const* argv);

/// Runs the adaptive loop and writes all outputs; returns the exit code.
int run(const AdaptiveConfig& config);

} // namespace stbem::cli
