#pragma once

// Correlation matrices of product initial states, subsystem restriction and
// bipartite entanglement entropy of evolved quasi-free states.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "xylab/correlation.hpp"
#include "xylab/dynamics.hpp"
#include "xylab/model.hpp"
#include "xylab/spectral.hpp"

namespace xylab {

/// Eigenvalues of a subsystem correlation matrix may leave [0, 1] by at most this much.
inline constexpr double kClampTolerance = 1e-8;

/// Per-site blocks diag(1 - eta_j, eta_j), no anomalous terms.
CorrelationMatrix gamma_density_profile(const DensityProfile& profile);

/// Eigensystems of the restricted matrices M_k, one per block of a partition.
class BlockSpectra {
public:
    BlockSpectra(const ChainParameters& params, const Partition& partition);

    const Partition& partition() const noexcept { return partition_; }
    std::size_t sites() const noexcept { return partition_.sites(); }
    const EigenSystem& block(std::size_t k) const { return spectra_.at(k); }

    /// 2n x n block-diagonal basis whose column span is the range of the product state's Gamma.
    Eigen::MatrixXd projection_basis(const std::vector<OccupationPattern>& patterns) const;
    /// Same, with `global` split along the partition.
    Eigen::MatrixXd projection_basis(const OccupationPattern& global) const;

private:
    Partition partition_;
    std::vector<EigenSystem> spectra_;
};

/// Direct sum over blocks of the spectral projections chi_{Delta_alpha(k)}(M_k).
CorrelationMatrix gamma_eigenstate_product(const ChainParameters& params, const Partition& partition,
                                           const std::vector<OccupationPattern>& patterns);

/// Principal submatrix on the rows/cols of the sites in `block`.
CorrelationMatrix restrict_gamma(const CorrelationMatrix& gamma, const Subinterval& block);

struct EntropySpectrum {
    std::vector<double> eigenvalues;  ///< all eigenvalues of Gamma_1 after clamping, ascending
    std::vector<double> xi;           ///< lower member of each (xi, 1 - xi) pair
    double entropy = 0.0;             ///< nats
    double pairing_defect = 0.0;      ///< max |eps_i + eps_{2m-1-i} - 1|
    double trace = 0.0;
};

/// -sum eps log eps over the eigenvalues of Gamma_1. Throws StateCorruptionError
/// when an eigenvalue lies outside [-1e-8, 1 + 1e-8].
EntropySpectrum entanglement_entropy(const CorrelationMatrix& gamma1);
EntropySpectrum entropy_from_eigenvalues(std::vector<double> eigenvalues);

/// -p log p - (1 - p) log(1 - p) with clamping of p.
double binary_entropy(double p);

/// 2 log 2 times the sum of spectral norms of the 2x2 blocks Gamma_{l l'}, l in block, l' outside.
double entropy_upper_diagnostic(const CorrelationMatrix& gamma, const Subinterval& block);

/// Global occupation patterns scanned for the sup over eigenstate products.
struct PatternBattery {
    std::vector<OccupationPattern> patterns;
    bool exhaustive = false;
};

/// All 2^n patterns when n <= exhaustive_limit, otherwise zeros, ones, alternating and `random_count` seeded draws.
PatternBattery pattern_battery(std::size_t n, std::size_t random_count, std::uint64_t seed,
                               std::size_t exhaustive_limit = 12);

struct SweepOptions {
    bool diagnostic = true;
    /// Skip the particle-sector shortcut for isotropic chains.
    bool force_general = false;
};

struct EntropySeries {
    std::vector<double> entropy;     ///< nats, one per grid time
    std::vector<double> diagnostic;  ///< empty when disabled
    double max_entropy = 0.0;
    double argmax_t = 0.0;
};

/// Entropy of a fixed subsystem for eigenstate products of one chain, evolved
/// with the full chain Hamiltonian.
///
/// Gamma_0 = P P^T with P the block projection basis, so Gamma_1(t) = K K^* with
/// K = (V e^{-2it Lambda} V^T P) restricted to the subsystem rows.
class EntropyEvolution {
public:
    EntropyEvolution(const ChainParameters& params, const Partition& partition, const Subinterval& block,
                     SweepOptions options = {});

    bool isotropic_path() const noexcept { return isotropic_; }
    const Subinterval& block() const noexcept { return block_; }

    EntropySeries run(const OccupationPattern& global, const TimeGrid& grid) const;

private:
    struct SectorBlock {
        Eigen::MatrixXd vectors;            // block-local eigenvectors of A_k
        std::vector<Eigen::Index> order;    // mode j -> column of vectors
        std::vector<bool> positive;         // mode j: sign of the A_k eigenvalue
    };

    EntropySeries run_general(const OccupationPattern& global, const TimeGrid& grid) const;
    EntropySeries run_isotropic(const OccupationPattern& global, const TimeGrid& grid) const;

    Partition partition_;
    Subinterval block_;
    SweepOptions options_;
    bool isotropic_ = false;
    std::optional<EigenSystem> global_;
    std::optional<BlockSpectra> blocks_;
    std::vector<SectorBlock> sectors_;
};

struct SweepResult {
    std::vector<EntropySeries> series;  ///< one per pattern
    double max_entropy = 0.0;
    std::size_t argmax_pattern = 0;
    double argmax_t = 0.0;
};

SweepResult evolved_entropy_sweep(const ChainParameters& params, const Partition& partition,
                                  const std::vector<OccupationPattern>& patterns, const Subinterval& block,
                                  const TimeGrid& grid, SweepOptions options = {});

/// Entropy of `block` for an arbitrary initial Gamma evolved by the chain's M, via full conjugation.
double evolved_entropy(const EigenSystem& global, const CorrelationMatrix& gamma0, const Subinterval& block, double t);

}  // namespace xylab
