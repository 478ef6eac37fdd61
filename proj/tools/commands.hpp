#pragma once

#include <CLI11.hpp>

namespace distrep::cli {

/// Registers every subcommand on `app`.
void register_commands(CLI::App& app);

}  // namespace distrep::cli
