#include "xylab/correlation.hpp"

#include "xylab/error.hpp"

namespace xylab {

OccupationPattern::OccupationPattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        if (b > 1) {
            throw ConfigError("occupation bits must be 0 or 1");
        }
    }
}

OccupationPattern OccupationPattern::parse(const std::string& bits) {
    std::vector<std::uint8_t> out;
    out.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw ConfigError("occupation pattern must contain only '0' and '1': " + bits);
        }
        out.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return OccupationPattern(std::move(out));
}

OccupationPattern OccupationPattern::zeros(std::size_t n) { return OccupationPattern(std::vector<std::uint8_t>(n, 0)); }

OccupationPattern OccupationPattern::ones(std::size_t n) { return OccupationPattern(std::vector<std::uint8_t>(n, 1)); }

OccupationPattern OccupationPattern::alternating(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = static_cast<std::uint8_t>(j % 2);
    }
    return OccupationPattern(std::move(out));
}

OccupationPattern OccupationPattern::from_index(std::uint64_t index, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = static_cast<std::uint8_t>((index >> j) & 1U);
    }
    return OccupationPattern(std::move(out));
}

OccupationPattern OccupationPattern::random(std::size_t n, Rng& rng) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) {
        b = static_cast<std::uint8_t>(rng() >> 63);
    }
    return OccupationPattern(std::move(out));
}

OccupationPattern OccupationPattern::complement() const {
    std::vector<std::uint8_t> out(bits_.size());
    for (std::size_t j = 0; j < bits_.size(); ++j) {
        out[j] = static_cast<std::uint8_t>(1 - bits_[j]);
    }
    return OccupationPattern(std::move(out));
}

OccupationPattern OccupationPattern::slice(std::size_t offset, std::size_t count) const {
    if (offset + count > bits_.size()) {
        throw IndexError("pattern slice out of range");
    }
    return OccupationPattern(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                                                       bits_.begin() + static_cast<std::ptrdiff_t>(offset + count)));
}

std::string OccupationPattern::str() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) {
        s.push_back(static_cast<char>('0' + b));
    }
    return s;
}

std::vector<OccupationPattern> split_pattern(const OccupationPattern& global, const Partition& partition) {
    if (global.size() != partition.sites()) {
        throw StructuralError("pattern length " + std::to_string(global.size()) + " does not match chain length " +
                              std::to_string(partition.sites()));
    }
    std::vector<OccupationPattern> out;
    for (const auto& block : partition.blocks()) {
        out.push_back(global.slice(block.a() - 1, block.size()));
    }
    return out;
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXcd entries, Provenance provenance)
    : entries_(std::move(entries)), provenance_(provenance) {
    if (entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0 || entries_.rows() == 0) {
        throw StructuralError("correlation matrix must be square with even positive dimension");
    }
}

double CorrelationMatrix::hermiticity_defect() const { return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff(); }

double CorrelationMatrix::idempotence_defect() const {
    return (entries_ * entries_ - entries_).cwiseAbs().maxCoeff();
}

const char* to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::projection: return "projection";
        case Provenance::density_profile: return "density_profile";
        case Provenance::evolved: return "evolved";
        case Provenance::restricted: return "restricted";
        case Provenance::dense: return "dense";
    }
    return "unknown";
}

}  // namespace xylab
