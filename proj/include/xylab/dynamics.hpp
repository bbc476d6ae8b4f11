#pragma once

// Time evolution and particle transport. Times are dimensionless (hbar = 1)
// and the factor 2 in the propagator exponent is kept as is.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "xylab/correlation.hpp"
#include "xylab/model.hpp"
#include "xylab/spectral.hpp"

namespace xylab {

/// e^{-2itM} for flavor M, e^{2itA} for flavor A.
class Propagator {
public:
    Propagator(Flavor flavor, double t, Eigen::MatrixXcd matrix);

    Flavor flavor() const noexcept { return flavor_; }
    double time() const noexcept { return t_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    /// max |U U^* - I|
    double unitarity_defect() const;

private:
    Flavor flavor_;
    double t_;
    Eigen::MatrixXcd matrix_;
};

Propagator propagator(const EigenSystem& eig, double t);

/// Product state with site occupations eta_j = <a_j^* a_j>.
class DensityProfile {
public:
    explicit DensityProfile(std::vector<double> eta);
    /// eta = indicator of `wall`: up spins on the wall, down elsewhere.
    static DensityProfile domain_wall(std::size_t n, const Subinterval& wall);
    static DensityProfile constant(std::size_t n, double value);
    /// eta_j = bit j of the configuration (1 = up).
    static DensityProfile from_bits(const OccupationPattern& bits);

    std::size_t sites() const noexcept { return eta_.size(); }
    const std::vector<double>& eta() const noexcept { return eta_; }
    double operator[](std::size_t site) const { return eta_.at(site - 1); }
    double total() const noexcept;
    /// sum_{j in S} eta_j
    double sum_over(const SiteSet& s) const;
    /// The interval when eta is the indicator of one nonempty interval.
    std::optional<Subinterval> wall() const;

private:
    std::vector<double> eta_;
};

class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);
    /// `count` geometrically spaced points on [t_min, t_max], optionally preceded by t = 0.
    static TimeGrid geometric(std::size_t count, double t_min, double t_max, bool include_zero);
    /// `count` equally spaced points on [0, t_max].
    static TimeGrid linear(std::size_t count, double t_max);
    /// 0 plus 200 geometric points on [0.05, 500].
    static TimeGrid standard();

    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t size() const noexcept { return times_.size(); }
    double operator[](std::size_t i) const { return times_.at(i); }

private:
    std::vector<double> times_;
};

/// U Gamma U^*.
CorrelationMatrix evolve_correlation(const CorrelationMatrix& gamma0, const Propagator& prop);

/// <a_j^* a_j>_t = sum_k eta_k |U_jk|^2 for every site.
Eigen::VectorXd site_densities(const Propagator& prop, const DensityProfile& profile);

/// <N_S>_t for the isotropic chain.
double transport_expectation(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s, double t);
double transport_expectation(const Propagator& prop, const DensityProfile& profile, const SiteSet& s);

/// |S| - <N_S>_t
double hole_expectation(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s, double t);
double hole_expectation(const Propagator& prop, const DensityProfile& profile, const SiteSet& s);

struct SitePair {
    std::size_t j = 0;
    std::size_t k = 0;
    friend bool operator==(const SitePair&, const SitePair&) = default;
};

/// sum over pairs of F(|j - k|), F taken from the correlator profile.
double pair_sum(const std::vector<SitePair>& pairs, const CorrelatorProfile& correlator);

struct TransportRhs {
    double particles = 0.0;  ///< sum_{j in S} sum_k eta_k F(|j-k|)
    double holes = 0.0;      ///< sum_{j in S} sum_k (1 - eta_k) F(|j-k|)
    /// 2 sum_{r = d}^{n} r F(r) with d = distance(S, wall); only for domain walls with S outside the wall.
    std::optional<double> domain_wall;
};

TransportRhs transport_bound_rhs(const DensityProfile& profile, const SiteSet& s, const CorrelatorProfile& correlator);

struct DifferenceBound {
    double lhs = 0.0;              ///< |<N_S>_t - <N_S>_0|
    std::vector<SitePair> pairs;   ///< j in S, k outside S
};

DifferenceBound transport_difference_bound(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s,
                                           double t);

struct EnvelopeBound {
    double lhs = 0.0;              ///< <N_S>_t
    double reference = 0.0;        ///< <N_K>_0
    std::vector<SitePair> pairs;   ///< j in S, k outside K
};

EnvelopeBound transport_envelope_bound(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s,
                                       const SiteSet& k, double t);

}  // namespace xylab
