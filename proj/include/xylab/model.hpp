#pragma once

// Chain parameters, disorder distributions, lattice geometry and the
// effective one-particle matrices of the XY chain.
//
// Site indices are 1-based everywhere in the public API. Matrices are stored
// 0-based: site j of the anisotropic matrix occupies rows/cols 2j-2, 2j-1
// (the c_j and c_j^* components).

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "xylab/seeding.hpp"

namespace xylab {

/// Closed interval [a, b] of sites, 1 <= a <= b.
class Subinterval {
public:
    Subinterval(std::size_t a, std::size_t b);

    std::size_t a() const noexcept { return a_; }
    std::size_t b() const noexcept { return b_; }
    std::size_t size() const noexcept { return b_ - a_ + 1; }
    bool contains(std::size_t site) const noexcept { return site >= a_ && site <= b_; }

    /// Throws IndexError unless the interval lies in [1, n].
    void check_within(std::size_t n) const;

    friend bool operator==(const Subinterval&, const Subinterval&) = default;

private:
    std::size_t a_;
    std::size_t b_;
};

/// Sorted set of distinct 1-based sites.
class SiteSet {
public:
    SiteSet() = default;
    explicit SiteSet(std::vector<std::size_t> sites);
    SiteSet(std::initializer_list<std::size_t> sites) : SiteSet(std::vector<std::size_t>(sites)) {}
    SiteSet(const Subinterval& interval);  // NOLINT(google-explicit-constructor)

    const std::vector<std::size_t>& sites() const noexcept { return sites_; }
    std::size_t size() const noexcept { return sites_.size(); }
    bool empty() const noexcept { return sites_.empty(); }
    bool contains(std::size_t site) const noexcept;
    bool is_subset_of(const SiteSet& other) const;

    /// Sites of [1, n] not in this set.
    SiteSet complement(std::size_t n) const;
    void check_within(std::size_t n) const;

    friend bool operator==(const SiteSet&, const SiteSet&) = default;

private:
    std::vector<std::size_t> sites_;
};

/// Minimum |j - k| over j in s, k in t.
std::size_t distance(const SiteSet& s, const SiteSet& t);

/// Decomposition of [1, n] into consecutive blocks.
///
/// Stored by block start points 1 = s_1 < ... < s_m <= n; block k is
/// [s_k, s_{k+1} - 1] and the last block ends at n. This admits the all-singleton
/// partition, which a strictly increasing cut list r_0 < ... < r_m = n cannot express.
class Partition {
public:
    static Partition from_block_starts(std::vector<std::size_t> starts, std::size_t n);
    /// Cut points 1 = r_0 < r_1 < ... < r_m = n; blocks [r_{k-1}, r_k - 1], last [r_{m-1}, n].
    static Partition from_cut_points(const std::vector<std::size_t>& cuts, std::size_t n);
    static Partition whole(std::size_t n);
    static Partition singletons(std::size_t n);
    /// Two blocks [1, n/2] and [n/2 + 1, n]; requires n >= 2.
    static Partition halves(std::size_t n);

    std::size_t sites() const noexcept { return n_; }
    std::size_t block_count() const noexcept { return starts_.size(); }
    const std::vector<std::size_t>& starts() const noexcept { return starts_; }
    std::vector<Subinterval> blocks() const;
    Subinterval block(std::size_t k) const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    Partition(std::vector<std::size_t> starts, std::size_t n);

    std::vector<std::size_t> starts_;
    std::size_t n_;
};

/// Couplings mu_j, anisotropies gamma_j (j < n) and fields nu_j (j <= n).
class ChainParameters {
public:
    ChainParameters(std::vector<double> mu, std::vector<double> gamma, std::vector<double> nu);

    /// Translation-invariant chain with the given constants.
    static ChainParameters constant(std::size_t n, double mu, double gamma, double nu);

    std::size_t sites() const noexcept { return nu_.size(); }
    const std::vector<double>& mu() const noexcept { return mu_; }
    const std::vector<double>& gamma() const noexcept { return gamma_; }
    const std::vector<double>& nu() const noexcept { return nu_; }

    /// True when every gamma_j is exactly zero (the XX chain).
    bool isotropic() const noexcept;

    /// Same chain with all gamma_j set to zero.
    ChainParameters with_zero_anisotropy() const;

    /// Parameters of the chain restricted to `block`; couplings leaving the block are dropped.
    ChainParameters restricted(const Subinterval& block) const;

    friend bool operator==(const ChainParameters&, const ChainParameters&) = default;

private:
    std::vector<double> mu_;
    std::vector<double> gamma_;
    std::vector<double> nu_;
};

struct ConstantDistribution {
    double value = 0.0;
};

struct UniformDistribution {
    double low = 0.0;
    double high = 1.0;
};

/// Takes `first` with probability p, otherwise `second`.
struct TwoPointDistribution {
    double first = 1.0;
    double second = -1.0;
    double p = 0.5;
};

using Distribution = std::variant<ConstantDistribution, UniformDistribution, TwoPointDistribution>;

void validate(const Distribution& d);
std::string describe(const Distribution& d);
bool is_degenerate(const Distribution& d);

struct DisorderSpec {
    Distribution mu = ConstantDistribution{1.0};
    Distribution gamma = ConstantDistribution{0.0};
    Distribution nu = ConstantDistribution{0.0};
    std::uint64_t seed = 0;
};

/// Draws mu, gamma and nu from independent labeled sub-streams of spec.seed.
ChainParameters sample_parameters(const DisorderSpec& spec, std::size_t n);

enum class Flavor {
    isotropic,    ///< n x n Jacobi matrix A
    anisotropic,  ///< 2n x 2n block Jacobi matrix M
};

const char* to_string(Flavor f) noexcept;

/// Effective one-particle matrix (A or M), dense and exactly symmetric.
class BlockMatrix {
public:
    BlockMatrix(Flavor flavor, Eigen::MatrixXd entries);

    Flavor flavor() const noexcept { return flavor_; }
    std::size_t sites() const noexcept { return sites_; }
    /// 1 for A, 2 for M.
    std::size_t block_size() const noexcept { return flavor_ == Flavor::isotropic ? 1 : 2; }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }

private:
    Flavor flavor_;
    std::size_t sites_;
    Eigen::MatrixXd entries_;
};

/// S(gamma) = [[1, gamma], [-gamma, -1]].
Eigen::Matrix2d anisotropy_block(double gamma);

/// Jacobi matrix with diagonal -nu_j and off-diagonal mu_j (gamma is ignored).
BlockMatrix build_isotropic(const ChainParameters& params);

/// Block tridiagonal M: diagonal blocks -nu_j sigma^z, upper mu_j S(gamma_j), lower mu_j S(gamma_j)^T.
BlockMatrix build_anisotropic(const ChainParameters& params);

/// Principal submatrix on the sites of `block`.
BlockMatrix restrict(const BlockMatrix& matrix, const Subinterval& block);

/// J = direct sum of sigma^x over the sites; JMJ = -M for every anisotropic M.
Eigen::MatrixXd particle_hole_swap(std::size_t n);

}  // namespace xylab
