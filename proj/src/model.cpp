#include "xylab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xylab/error.hpp"

namespace xylab {

Subinterval::Subinterval(std::size_t a, std::size_t b) : a_(a), b_(b) {
    if (a < 1 || a > b) {
        throw IndexError("invalid subinterval [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
}

void Subinterval::check_within(std::size_t n) const {
    if (b_ > n) {
        throw IndexError("subinterval [" + std::to_string(a_) + ", " + std::to_string(b_) +
                         "] exceeds chain [1, " + std::to_string(n) + "]");
    }
}

SiteSet::SiteSet(std::vector<std::size_t> sites) : sites_(std::move(sites)) {
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    if (!sites_.empty() && sites_.front() == 0) {
        throw IndexError("site indices are 1-based");
    }
}

SiteSet::SiteSet(const Subinterval& interval) {
    sites_.reserve(interval.size());
    for (std::size_t j = interval.a(); j <= interval.b(); ++j) {
        sites_.push_back(j);
    }
}

bool SiteSet::contains(std::size_t site) const noexcept {
    return std::binary_search(sites_.begin(), sites_.end(), site);
}

bool SiteSet::is_subset_of(const SiteSet& other) const {
    return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(), sites_.end());
}

SiteSet SiteSet::complement(std::size_t n) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 1; j <= n; ++j) {
        if (!contains(j)) {
            out.push_back(j);
        }
    }
    return SiteSet(std::move(out));
}

void SiteSet::check_within(std::size_t n) const {
    if (!sites_.empty() && sites_.back() > n) {
        throw IndexError("site " + std::to_string(sites_.back()) + " outside chain [1, " +
                         std::to_string(n) + "]");
    }
}

std::size_t distance(const SiteSet& s, const SiteSet& t) {
    if (s.empty() || t.empty()) {
        throw StructuralError("distance between empty site sets");
    }
    std::size_t best = static_cast<std::size_t>(-1);
    for (std::size_t j : s.sites()) {
        for (std::size_t k : t.sites()) {
            best = std::min(best, j > k ? j - k : k - j);
        }
    }
    return best;
}

Partition::Partition(std::vector<std::size_t> starts, std::size_t n) : starts_(std::move(starts)), n_(n) {
    if (n == 0) {
        throw ConfigError("partition of an empty chain");
    }
    if (starts_.empty() || starts_.front() != 1) {
        throw ConfigError("partition must start at site 1");
    }
    for (std::size_t k = 1; k < starts_.size(); ++k) {
        if (starts_[k] <= starts_[k - 1]) {
            throw ConfigError("partition block starts must be strictly increasing");
        }
    }
    if (starts_.back() > n) {
        throw ConfigError("partition block start beyond chain end");
    }
}

Partition Partition::from_block_starts(std::vector<std::size_t> starts, std::size_t n) {
    return Partition(std::move(starts), n);
}

Partition Partition::from_cut_points(const std::vector<std::size_t>& cuts, std::size_t n) {
    if (cuts.size() < 2 || cuts.front() != 1 || cuts.back() != n) {
        throw ConfigError("cut points must run from 1 to n");
    }
    for (std::size_t k = 1; k < cuts.size(); ++k) {
        if (cuts[k] <= cuts[k - 1]) {
            throw ConfigError("cut points must be strictly increasing");
        }
    }
    return Partition(std::vector<std::size_t>(cuts.begin(), cuts.end() - 1), n);
}

Partition Partition::whole(std::size_t n) { return Partition({1}, n); }

Partition Partition::singletons(std::size_t n) {
    std::vector<std::size_t> starts(n);
    for (std::size_t j = 0; j < n; ++j) {
        starts[j] = j + 1;
    }
    return Partition(std::move(starts), n);
}

Partition Partition::halves(std::size_t n) {
    if (n < 2) {
        throw ConfigError("halves partition needs n >= 2");
    }
    return Partition({1, n / 2 + 1}, n);
}

Subinterval Partition::block(std::size_t k) const {
    const std::size_t end = k + 1 < starts_.size() ? starts_[k + 1] - 1 : n_;
    return Subinterval(starts_.at(k), end);
}

std::vector<Subinterval> Partition::blocks() const {
    std::vector<Subinterval> out;
    out.reserve(starts_.size());
    for (std::size_t k = 0; k < starts_.size(); ++k) {
        out.push_back(block(k));
    }
    return out;
}

namespace {

void require_finite(const std::vector<double>& v, const char* name) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw ConfigError(std::string("non-finite value in ") + name);
        }
    }
}

}  // namespace

ChainParameters::ChainParameters(std::vector<double> mu, std::vector<double> gamma, std::vector<double> nu)
    : mu_(std::move(mu)), gamma_(std::move(gamma)), nu_(std::move(nu)) {
    if (nu_.empty()) {
        throw ConfigError("chain needs at least one site");
    }
    if (mu_.size() != nu_.size() - 1 || gamma_.size() != nu_.size() - 1) {
        throw ConfigError("mu and gamma must have length n-1 for n = " + std::to_string(nu_.size()));
    }
    require_finite(mu_, "mu");
    require_finite(gamma_, "gamma");
    require_finite(nu_, "nu");
}

ChainParameters ChainParameters::constant(std::size_t n, double mu, double gamma, double nu) {
    if (n == 0) {
        throw ConfigError("chain needs at least one site");
    }
    return ChainParameters(std::vector<double>(n - 1, mu), std::vector<double>(n - 1, gamma),
                           std::vector<double>(n, nu));
}

bool ChainParameters::isotropic() const noexcept {
    return std::all_of(gamma_.begin(), gamma_.end(), [](double g) { return g == 0.0; });
}

ChainParameters ChainParameters::with_zero_anisotropy() const {
    return ChainParameters(mu_, std::vector<double>(gamma_.size(), 0.0), nu_);
}

ChainParameters ChainParameters::restricted(const Subinterval& block) const {
    block.check_within(sites());
    const auto first = static_cast<std::ptrdiff_t>(block.a() - 1);
    const auto last = static_cast<std::ptrdiff_t>(block.b());
    return ChainParameters(std::vector<double>(mu_.begin() + first, mu_.begin() + last - 1),
                           std::vector<double>(gamma_.begin() + first, gamma_.begin() + last - 1),
                           std::vector<double>(nu_.begin() + first, nu_.begin() + last));
}

void validate(const Distribution& d) {
    std::visit(
        [](const auto& dist) {
            using T = std::decay_t<decltype(dist)>;
            if constexpr (std::is_same_v<T, ConstantDistribution>) {
                if (!std::isfinite(dist.value)) {
                    throw ConfigError("constant distribution value must be finite");
                }
            } else if constexpr (std::is_same_v<T, UniformDistribution>) {
                if (!std::isfinite(dist.low) || !std::isfinite(dist.high) || dist.low > dist.high) {
                    throw ConfigError("uniform distribution needs finite low <= high");
                }
            } else {
                if (!std::isfinite(dist.first) || !std::isfinite(dist.second)) {
                    throw ConfigError("two-point distribution values must be finite");
                }
                if (!(dist.p >= 0.0 && dist.p <= 1.0)) {
                    throw ConfigError("two-point probability must lie in [0, 1]");
                }
            }
        },
        d);
}

std::string describe(const Distribution& d) {
    std::ostringstream os;
    std::visit(
        [&os](const auto& dist) {
            using T = std::decay_t<decltype(dist)>;
            if constexpr (std::is_same_v<T, ConstantDistribution>) {
                os << "constant(" << dist.value << ")";
            } else if constexpr (std::is_same_v<T, UniformDistribution>) {
                os << "uniform(" << dist.low << ", " << dist.high << ")";
            } else {
                os << "two_point(" << dist.first << ", " << dist.second << ", " << dist.p << ")";
            }
        },
        d);
    return os.str();
}

bool is_degenerate(const Distribution& d) {
    if (std::holds_alternative<ConstantDistribution>(d)) {
        return true;
    }
    if (const auto* u = std::get_if<UniformDistribution>(&d)) {
        return u->low == u->high;
    }
    const auto& t = std::get<TwoPointDistribution>(d);
    return t.first == t.second || t.p == 0.0 || t.p == 1.0;
}

namespace {

std::vector<double> draw(const Distribution& d, std::size_t count, std::uint64_t seed) {
    std::vector<double> out(count);
    Rng rng = make_rng(seed);
    std::visit(
        [&](const auto& dist) {
            using T = std::decay_t<decltype(dist)>;
            if constexpr (std::is_same_v<T, ConstantDistribution>) {
                std::fill(out.begin(), out.end(), dist.value);
            } else if constexpr (std::is_same_v<T, UniformDistribution>) {
                std::uniform_real_distribution<double> u(dist.low, dist.high);
                for (auto& x : out) {
                    x = dist.low == dist.high ? dist.low : u(rng);
                }
            } else {
                std::bernoulli_distribution coin(dist.p);
                for (auto& x : out) {
                    x = coin(rng) ? dist.first : dist.second;
                }
            }
        },
        d);
    return out;
}

}  // namespace

ChainParameters sample_parameters(const DisorderSpec& spec, std::size_t n) {
    if (n == 0) {
        throw ConfigError("n must be positive");
    }
    validate(spec.mu);
    validate(spec.gamma);
    validate(spec.nu);
    return ChainParameters(draw(spec.mu, n - 1, derive_seed(spec.seed, "mu")),
                           draw(spec.gamma, n - 1, derive_seed(spec.seed, "gamma")),
                           draw(spec.nu, n, derive_seed(spec.seed, "nu")));
}

const char* to_string(Flavor f) noexcept { return f == Flavor::isotropic ? "A" : "M"; }

BlockMatrix::BlockMatrix(Flavor flavor, Eigen::MatrixXd entries) : flavor_(flavor), entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw StructuralError("block matrix must be square");
    }
    const auto dim = static_cast<std::size_t>(entries_.rows());
    if (dim == 0 || dim % block_size() != 0) {
        throw StructuralError("block matrix dimension incompatible with flavor");
    }
    sites_ = dim / block_size();
}

Eigen::Matrix2d anisotropy_block(double gamma) {
    Eigen::Matrix2d s;
    s << 1.0, gamma, -gamma, -1.0;
    return s;
}

BlockMatrix build_isotropic(const ChainParameters& params) {
    const auto n = static_cast<Eigen::Index>(params.sites());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        a(j, j) = -params.nu()[j];
        if (j + 1 < n) {
            a(j, j + 1) = params.mu()[j];
            a(j + 1, j) = params.mu()[j];
        }
    }
    return BlockMatrix(Flavor::isotropic, std::move(a));
}

BlockMatrix build_anisotropic(const ChainParameters& params) {
    const auto n = static_cast<Eigen::Index>(params.sites());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        m(2 * j, 2 * j) = -params.nu()[j];
        m(2 * j + 1, 2 * j + 1) = params.nu()[j];
        if (j + 1 < n) {
            const Eigen::Matrix2d upper = params.mu()[j] * anisotropy_block(params.gamma()[j]);
            m.block<2, 2>(2 * j, 2 * j + 2) = upper;
            m.block<2, 2>(2 * j + 2, 2 * j) = upper.transpose();
        }
    }
    return BlockMatrix(Flavor::anisotropic, std::move(m));
}

BlockMatrix restrict(const BlockMatrix& matrix, const Subinterval& block) {
    block.check_within(matrix.sites());
    const auto bs = static_cast<Eigen::Index>(matrix.block_size());
    const auto offset = static_cast<Eigen::Index>(block.a() - 1) * bs;
    const auto dim = static_cast<Eigen::Index>(block.size()) * bs;
    return BlockMatrix(matrix.flavor(), matrix.entries().block(offset, offset, dim, dim));
}

Eigen::MatrixXd particle_hole_swap(std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(2 * n);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; s += 2) {
        j(s, s + 1) = 1.0;
        j(s + 1, s) = 1.0;
    }
    return j;
}

}  // namespace xylab
