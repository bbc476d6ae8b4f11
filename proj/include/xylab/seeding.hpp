#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace xylab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Sub-seed for a labeled stream ("mu", "nu", "patterns", ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

/// Counter-based sub-seed (realization index, system size, ...).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) noexcept;

Rng make_rng(std::uint64_t seed);

}  // namespace xylab
