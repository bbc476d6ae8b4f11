#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xylab/model.hpp"

namespace xylab {

/// Occupation bits alpha_j of the fermionic eigenmodes b_j^* (ordered by ascending lambda_j).
class OccupationPattern {
public:
    OccupationPattern() = default;
    explicit OccupationPattern(std::vector<std::uint8_t> bits);
    /// Parses a string of '0'/'1' characters.
    static OccupationPattern parse(const std::string& bits);
    static OccupationPattern zeros(std::size_t n);
    static OccupationPattern ones(std::size_t n);
    /// 0, 1, 0, 1, ...
    static OccupationPattern alternating(std::size_t n);
    /// Bit j is (index >> j) & 1.
    static OccupationPattern from_index(std::uint64_t index, std::size_t n);
    static OccupationPattern random(std::size_t n, Rng& rng);

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t j) const { return bits_.at(j) != 0; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    OccupationPattern complement() const;
    /// Bits of the sites/modes [offset, offset + count).
    OccupationPattern slice(std::size_t offset, std::size_t count) const;
    std::string str() const;

    friend bool operator==(const OccupationPattern&, const OccupationPattern&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Splits a length-n pattern into per-block patterns of `partition`.
std::vector<OccupationPattern> split_pattern(const OccupationPattern& global, const Partition& partition);

enum class Provenance { projection, density_profile, evolved, restricted, dense };

/// Gamma = <C C^*> for C = (c_1, c_1^*, ..., c_n, c_n^*)^T.
class CorrelationMatrix {
public:
    CorrelationMatrix(Eigen::MatrixXcd entries, Provenance provenance);

    std::size_t sites() const noexcept { return static_cast<std::size_t>(entries_.rows() / 2); }
    const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    Provenance provenance() const noexcept { return provenance_; }

    /// max |Gamma - Gamma^*|
    double hermiticity_defect() const;
    /// max |Gamma^2 - Gamma|
    double idempotence_defect() const;

private:
    Eigen::MatrixXcd entries_;
    Provenance provenance_;
};

const char* to_string(Provenance p) noexcept;

}  // namespace xylab
