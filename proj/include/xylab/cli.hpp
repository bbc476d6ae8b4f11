#pragma once

// Command-line front end: transport, entanglement, eigencorrelator, verify.

#include <functional>

#include "xylab/model.hpp"

namespace xylab {

inline constexpr const char* kToolVersion = "1.0.0";

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitNumeric = 2,
    kExitVerdict = 3,
};

/// Entry point used by the executable. Returns the process exit code.
int run_cli(int argc, const char* const* argv);

/// Same as run_cli, with the builder used by `verify` replaced (mutation testing).
int run_cli(int argc, const char* const* argv, const std::function<BlockMatrix(const ChainParameters&)>& builder);

}  // namespace xylab
