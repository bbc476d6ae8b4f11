#pragma once

// Named oracle checks behind the `verify` command.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xylab/model.hpp"

namespace xylab {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerificationOptions {
    std::uint64_t seed = 20240611;
    /// Builds M from chain parameters; replaceable so a broken builder can be shown to fail.
    std::function<BlockMatrix(const ChainParameters&)> anisotropic_builder = build_anisotropic;
};

std::vector<CheckResult> run_verification_suite(const VerificationOptions& options = {});

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace xylab
