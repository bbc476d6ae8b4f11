#include "xylab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "xylab/error.hpp"

namespace xylab {

Propagator::Propagator(Flavor flavor, double t, Eigen::MatrixXcd matrix)
    : flavor_(flavor), t_(t), matrix_(std::move(matrix)) {}

double Propagator::unitarity_defect() const {
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols());
    return (matrix_ * matrix_.adjoint() - id).cwiseAbs().maxCoeff();
}

Propagator propagator(const EigenSystem& eig, double t) {
    const double sign = eig.flavor() == Flavor::isotropic ? 2.0 : -2.0;
    Eigen::MatrixXcd u = matrix_function(eig, [&](double e) { return std::polar(1.0, sign * t * e); });
    return Propagator(eig.flavor(), t, std::move(u));
}

DensityProfile::DensityProfile(std::vector<double> eta) : eta_(std::move(eta)) {
    if (eta_.empty()) {
        throw ConfigError("density profile must cover at least one site");
    }
    for (std::size_t j = 0; j < eta_.size(); ++j) {
        if (!(eta_[j] >= 0.0 && eta_[j] <= 1.0)) {
            throw ConfigError("density eta_" + std::to_string(j + 1) + " outside [0, 1]");
        }
    }
}

DensityProfile DensityProfile::domain_wall(std::size_t n, const Subinterval& wall) {
    wall.check_within(n);
    std::vector<double> eta(n, 0.0);
    for (std::size_t j = wall.a(); j <= wall.b(); ++j) {
        eta[j - 1] = 1.0;
    }
    return DensityProfile(std::move(eta));
}

DensityProfile DensityProfile::constant(std::size_t n, double value) { return DensityProfile(std::vector<double>(n, value)); }

DensityProfile DensityProfile::from_bits(const OccupationPattern& bits) {
    std::vector<double> eta(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
        eta[j] = bits[j] ? 1.0 : 0.0;
    }
    return DensityProfile(std::move(eta));
}

double DensityProfile::total() const noexcept {
    double s = 0.0;
    for (double e : eta_) {
        s += e;
    }
    return s;
}

double DensityProfile::sum_over(const SiteSet& s) const {
    s.check_within(sites());
    double out = 0.0;
    for (std::size_t j : s.sites()) {
        out += eta_[j - 1];
    }
    return out;
}

std::optional<Subinterval> DensityProfile::wall() const {
    std::size_t first = 0;
    std::size_t last = 0;
    for (std::size_t j = 0; j < eta_.size(); ++j) {
        if (eta_[j] == 1.0) {
            if (first == 0) {
                first = j + 1;
            } else if (last != j) {
                return std::nullopt;
            }
            last = j + 1;
        } else if (eta_[j] != 0.0) {
            return std::nullopt;
        }
    }
    if (first == 0) {
        return std::nullopt;
    }
    return Subinterval(first, last);
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) {
        throw ConfigError("time grid is empty");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || times_[i] < 0.0) {
            throw ConfigError("time grid entries must be finite and nonnegative");
        }
        if (i > 0 && times_[i] <= times_[i - 1]) {
            throw ConfigError("time grid must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::geometric(std::size_t count, double t_min, double t_max, bool include_zero) {
    if (count == 0 || !(t_min > 0.0) || !(t_max >= t_min)) {
        throw ConfigError("geometric grid needs count >= 1 and 0 < t_min <= t_max");
    }
    std::vector<double> t;
    if (include_zero) {
        t.push_back(0.0);
    }
    if (count == 1) {
        t.push_back(t_min);
        return TimeGrid(std::move(t));
    }
    const double ratio = std::log(t_max / t_min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        t.push_back(i + 1 == count ? t_max : t_min * std::exp(ratio * static_cast<double>(i)));
    }
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::linear(std::size_t count, double t_max) {
    if (count < 2 || !(t_max > 0.0)) {
        throw ConfigError("linear grid needs count >= 2 and t_max > 0");
    }
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) {
        t[i] = t_max * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::standard() { return geometric(200, 0.05, 500.0, true); }

CorrelationMatrix evolve_correlation(const CorrelationMatrix& gamma0, const Propagator& prop) {
    if (gamma0.entries().rows() != prop.matrix().rows()) {
        throw StructuralError("correlation matrix and propagator differ in dimension");
    }
    Eigen::MatrixXcd g = prop.matrix() * gamma0.entries() * prop.matrix().adjoint();
    return CorrelationMatrix(std::move(g), Provenance::evolved);
}

namespace {

void require_isotropic(const Propagator& prop, const DensityProfile& profile) {
    if (prop.flavor() != Flavor::isotropic) {
        throw StructuralError("transport observables need the isotropic matrix A");
    }
    if (static_cast<std::size_t>(prop.matrix().rows()) != profile.sites()) {
        throw StructuralError("density profile length does not match chain length");
    }
}

std::vector<SitePair> pairs_between(const SiteSet& s, const SiteSet& outside) {
    std::vector<SitePair> out;
    out.reserve(s.size() * outside.size());
    for (std::size_t j : s.sites()) {
        for (std::size_t k : outside.sites()) {
            out.push_back({j, k});
        }
    }
    return out;
}

}  // namespace

Eigen::VectorXd site_densities(const Propagator& prop, const DensityProfile& profile) {
    require_isotropic(prop, profile);
    const Eigen::Map<const Eigen::VectorXd> eta(profile.eta().data(), static_cast<Eigen::Index>(profile.sites()));
    return prop.matrix().cwiseAbs2() * eta;
}

double transport_expectation(const Propagator& prop, const DensityProfile& profile, const SiteSet& s) {
    require_isotropic(prop, profile);
    s.check_within(profile.sites());
    const Eigen::MatrixXcd& u = prop.matrix();
    double out = 0.0;
    for (std::size_t j : s.sites()) {
        const auto row = static_cast<Eigen::Index>(j - 1);
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
            out += profile.eta()[static_cast<std::size_t>(k)] * std::norm(u(row, k));
        }
    }
    return out;
}

double transport_expectation(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s, double t) {
    return transport_expectation(propagator(eig, t), profile, s);
}

double hole_expectation(const Propagator& prop, const DensityProfile& profile, const SiteSet& s) {
    return static_cast<double>(s.size()) - transport_expectation(prop, profile, s);
}

double hole_expectation(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s, double t) {
    return hole_expectation(propagator(eig, t), profile, s);
}

double pair_sum(const std::vector<SitePair>& pairs, const CorrelatorProfile& correlator) {
    double out = 0.0;
    for (const auto& p : pairs) {
        out += correlator.at(p.j > p.k ? p.j - p.k : p.k - p.j);
    }
    return out;
}

TransportRhs transport_bound_rhs(const DensityProfile& profile, const SiteSet& s, const CorrelatorProfile& correlator) {
    const std::size_t n = profile.sites();
    s.check_within(n);
    if (correlator.size() < n) {
        throw StructuralError("correlator profile covers distances up to " + std::to_string(correlator.size()) +
                              " but the chain needs " + std::to_string(n));
    }
    TransportRhs rhs;
    for (std::size_t j : s.sites()) {
        for (std::size_t k = 1; k <= n; ++k) {
            const double f = correlator.at(j > k ? j - k : k - j);
            rhs.particles += profile.eta()[k - 1] * f;
            rhs.holes += (1.0 - profile.eta()[k - 1]) * f;
        }
    }
    if (const auto wall = profile.wall(); wall && !s.empty()) {
        const SiteSet w(*wall);
        bool outside = true;
        for (std::size_t j : s.sites()) {
            outside = outside && !w.contains(j);
        }
        if (outside) {
            double series = 0.0;
            for (std::size_t r = distance(s, w); r <= n; ++r) {
                series += static_cast<double>(r) * correlator.at(r);
            }
            rhs.domain_wall = 2.0 * series;
        }
    }
    return rhs;
}

DifferenceBound transport_difference_bound(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s,
                                           double t) {
    DifferenceBound out;
    const Propagator prop = propagator(eig, t);
    out.lhs = std::abs(transport_expectation(prop, profile, s) - profile.sum_over(s));
    out.pairs = pairs_between(s, s.complement(profile.sites()));
    return out;
}

EnvelopeBound transport_envelope_bound(const EigenSystem& eig, const DensityProfile& profile, const SiteSet& s,
                                       const SiteSet& k, double t) {
    if (!s.is_subset_of(k)) {
        throw StructuralError("envelope bound needs S contained in K");
    }
    k.check_within(profile.sites());
    EnvelopeBound out;
    out.lhs = transport_expectation(eig, profile, s, t);
    out.reference = profile.sum_over(k);
    out.pairs = pairs_between(s, k.complement(profile.sites()));
    return out;
}

}  // namespace xylab
