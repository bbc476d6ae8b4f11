#include "xylab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "xylab/entanglement.hpp"
#include "xylab/error.hpp"
#include "xylab/pfaffian.hpp"

namespace xylab {

namespace {

using cd = std::complex<double>;
using Triplet = Eigen::Triplet<cd>;

void guard(std::size_t n, std::size_t limit = kDenseSiteLimit) {
    if (n == 0 || n > limit) {
        throw SizeGuardError("dense many-body path supports 1 <= n <= " + std::to_string(limit) + ", got n = " +
                             std::to_string(n));
    }
}

Eigen::Index dimension(std::size_t n) { return Eigen::Index{1} << n; }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    Eigen::MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return out;
}

double entropy_of_density(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double p = solver.eigenvalues()(i);
        if (p > 0.0) {
            s -= p * std::log(p);
        }
    }
    return s;
}

/// F = sum_p w_p C_p
DenseOperator field_operator(const std::vector<DenseOperator>& components, const Eigen::RowVectorXcd& w) {
    DenseOperator f(components.front().sites(), SparseOperator(components.front().dim(), components.front().dim()));
    for (Eigen::Index p = 0; p < w.size(); ++p) {
        if (w(p) != 0.0) {
            f = f + w(p) * components[static_cast<std::size_t>(p)];
        }
    }
    return f;
}

Eigen::MatrixXcd random_weights(std::size_t count, std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(4.0 * static_cast<double>(n));
    Eigen::MatrixXcd w(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(2 * n));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index p = 0; p < w.cols(); ++p) {
            const double re = normal(rng);
            const double im = normal(rng);
            w(i, p) = scale * cd(re, im);
        }
    }
    return w;
}

}  // namespace

DenseOperator::DenseOperator(std::size_t sites, SparseOperator matrix) : sites_(sites), matrix_(std::move(matrix)) {
    guard(sites_);
    if (matrix_.rows() != dimension(sites_) || matrix_.cols() != dimension(sites_)) {
        throw StructuralError("operator dimension does not match 2^n");
    }
    matrix_.makeCompressed();
}

DenseOperator DenseOperator::adjoint() const { return DenseOperator(sites_, SparseOperator(matrix_.adjoint())); }

DenseOperator operator*(const DenseOperator& x, const DenseOperator& y) {
    return DenseOperator(x.sites(), SparseOperator(x.matrix() * y.matrix()));
}

DenseOperator operator+(const DenseOperator& x, const DenseOperator& y) {
    return DenseOperator(x.sites(), SparseOperator(x.matrix() + y.matrix()));
}

DenseOperator operator-(const DenseOperator& x, const DenseOperator& y) {
    return DenseOperator(x.sites(), SparseOperator(x.matrix() - y.matrix()));
}

DenseOperator operator*(cd s, const DenseOperator& x) { return DenseOperator(x.sites(), SparseOperator(s * x.matrix())); }

double max_abs(const DenseOperator& x) {
    double out = 0.0;
    const SparseOperator& m = x.matrix();
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(m, k); it; ++it) {
            out = std::max(out, std::abs(it.value()));
        }
    }
    return out;
}

DenseState::DenseState(std::size_t sites, Eigen::MatrixXcd density) : sites_(sites), density_(std::move(density)) {
    guard(sites_);
    if (density_.rows() != dimension(sites_) || density_.cols() != dimension(sites_)) {
        throw StructuralError("density matrix dimension does not match 2^n");
    }
}

DenseState DenseState::from_vector(std::size_t sites, const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) {
        throw NumericError("zero state vector");
    }
    const Eigen::VectorXcd v = psi / norm;
    return DenseState(sites, v * v.adjoint());
}

DenseState DenseState::basis(const OccupationPattern& up) {
    const std::size_t n = up.size();
    guard(n);
    Eigen::Index index = 0;
    for (std::size_t s = 0; s < n; ++s) {
        index = (index << 1) | (up[s] ? 0 : 1);
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dimension(n), dimension(n));
    rho(index, index) = 1.0;
    return DenseState(n, std::move(rho));
}

DenseState DenseState::density_profile(const DensityProfile& profile) {
    const std::size_t n = profile.sites();
    guard(n);
    Eigen::VectorXcd diag = Eigen::VectorXcd::Ones(1);
    for (double eta : profile.eta()) {
        Eigen::VectorXcd next(diag.size() * 2);
        for (Eigen::Index i = 0; i < diag.size(); ++i) {
            next(2 * i) = diag(i) * eta;
            next(2 * i + 1) = diag(i) * (1.0 - eta);
        }
        diag = std::move(next);
    }
    return DenseState(n, diag.asDiagonal());
}

DenseState DenseState::product(const std::vector<DenseState>& factors) {
    if (factors.empty()) {
        throw StructuralError("empty tensor product");
    }
    Eigen::MatrixXcd rho = factors.front().density();
    std::size_t n = factors.front().sites();
    for (std::size_t k = 1; k < factors.size(); ++k) {
        n += factors[k].sites();
        guard(n);
        rho = kron(rho, factors[k].density());
    }
    return DenseState(n, std::move(rho));
}

double DenseState::trace_defect() const { return std::abs(density_.trace() - 1.0); }

cd DenseState::expectation(const DenseOperator& x) const {
    cd out = 0.0;
    const SparseOperator& m = x.matrix();
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SparseOperator::InnerIterator it(m, k); it; ++it) {
            out += it.value() * density_(it.col(), it.row());
        }
    }
    return out;
}

DenseOperator site_operator(std::size_t n, std::size_t site, const Eigen::Matrix2cd& local) {
    guard(n);
    if (site < 1 || site > n) {
        throw IndexError("site " + std::to_string(site) + " outside chain [1, " + std::to_string(n) + "]");
    }
    const Eigen::Index dim = dimension(n);
    const auto shift = static_cast<int>(n - site);
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(2 * dim));
    for (Eigen::Index col = 0; col < dim; ++col) {
        const Eigen::Index bit = (col >> shift) & 1;
        for (Eigen::Index r = 0; r < 2; ++r) {
            const cd v = local(r, bit);
            if (v != 0.0) {
                const Eigen::Index row = (col & ~(Eigen::Index{1} << shift)) | (r << shift);
                entries.emplace_back(row, col, v);
            }
        }
    }
    SparseOperator m(dim, dim);
    m.setFromTriplets(entries.begin(), entries.end());
    return DenseOperator(n, std::move(m));
}

DenseOperator identity_operator(std::size_t n) {
    guard(n);
    SparseOperator m(dimension(n), dimension(n));
    m.setIdentity();
    return DenseOperator(n, std::move(m));
}

DenseOperator pauli_x(std::size_t n, std::size_t site) {
    Eigen::Matrix2cd x;
    x << 0.0, 1.0, 1.0, 0.0;
    return site_operator(n, site, x);
}

DenseOperator pauli_y(std::size_t n, std::size_t site) {
    Eigen::Matrix2cd y;
    y << 0.0, cd(0.0, -1.0), cd(0.0, 1.0), 0.0;
    return site_operator(n, site, y);
}

DenseOperator pauli_z(std::size_t n, std::size_t site) {
    Eigen::Matrix2cd z;
    z << 1.0, 0.0, 0.0, -1.0;
    return site_operator(n, site, z);
}

DenseOperator lowering(std::size_t n, std::size_t site) {
    Eigen::Matrix2cd a;
    a << 0.0, 0.0, 1.0, 0.0;
    return site_operator(n, site, a);
}

DenseOperator number_operator(std::size_t n, const SiteSet& s) {
    s.check_within(n);
    DenseOperator out(n, SparseOperator(dimension(n), dimension(n)));
    for (std::size_t j : s.sites()) {
        const DenseOperator a = lowering(n, j);
        out = out + a.adjoint() * a;
    }
    return out;
}

DenseOperator build_hamiltonian(const ChainParameters& params) {
    const std::size_t n = params.sites();
    guard(n);
    DenseOperator h(n, SparseOperator(dimension(n), dimension(n)));
    for (std::size_t j = 1; j < n; ++j) {
        const double mu = params.mu()[j - 1];
        const double g = params.gamma()[j - 1];
        h = h - cd(mu * (1.0 + g)) * (pauli_x(n, j) * pauli_x(n, j + 1));
        h = h - cd(mu * (1.0 - g)) * (pauli_y(n, j) * pauli_y(n, j + 1));
    }
    for (std::size_t j = 1; j <= n; ++j) {
        h = h - cd(params.nu()[j - 1]) * pauli_z(n, j);
    }
    return h;
}

std::vector<DenseOperator> build_jordan_wigner(std::size_t n) {
    guard(n);
    std::vector<DenseOperator> out;
    DenseOperator string = identity_operator(n);
    for (std::size_t j = 1; j <= n; ++j) {
        out.push_back(string * lowering(n, j));
        string = string * pauli_z(n, j);
    }
    return out;
}

std::vector<DenseOperator> field_components(std::size_t n) {
    std::vector<DenseOperator> out;
    for (const auto& c : build_jordan_wigner(n)) {
        out.push_back(c);
        out.push_back(c.adjoint());
    }
    return out;
}

QuadraticFormReport verify_quadratic_form(const ChainParameters& params, const BlockMatrix& m) {
    const std::size_t n = params.sites();
    guard(n, kQuadraticFormSiteLimit);
    if (m.flavor() != Flavor::anisotropic || m.sites() != n) {
        throw StructuralError("quadratic form check needs an anisotropic matrix on the same chain");
    }
    const DenseOperator h = build_hamiltonian(params);
    const auto comps = field_components(n);
    const Eigen::MatrixXd& mm = m.entries();

    DenseOperator form(n, SparseOperator(dimension(n), dimension(n)));
    for (std::size_t p = 0; p < comps.size(); ++p) {
        const DenseOperator left = comps[p].adjoint();
        for (std::size_t q = 0; q < comps.size(); ++q) {
            const double v = mm(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
            if (v != 0.0) {
                form = form + cd(v) * (left * comps[q]);
            }
        }
    }
    QuadraticFormReport report;
    report.anisotropic_residual = max_abs(h - form);

    if (params.isotropic()) {
        const BlockMatrix a = build_isotropic(params);
        const auto c = build_jordan_wigner(n);
        DenseOperator iso = cd(-a.entries().trace()) * identity_operator(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                const double v = a.entries()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                if (v != 0.0) {
                    iso = iso + cd(2.0 * v) * (c[j].adjoint() * c[k]);
                }
            }
        }
        report.isotropic_residual = max_abs(h - iso);
    }
    return report;
}

QuadraticFormReport verify_quadratic_form(const ChainParameters& params) {
    return verify_quadratic_form(params, build_anisotropic(params));
}

double car_defect(const std::vector<DenseOperator>& c) {
    if (c.empty()) {
        return 0.0;
    }
    const std::size_t n = c.front().sites();
    const DenseOperator id = identity_operator(n);
    double out = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            out = std::max(out, max_abs(c[j] * c[k] + c[k] * c[j]));
            DenseOperator mixed = c[j] * c[k].adjoint() + c[k].adjoint() * c[j];
            if (j == k) {
                mixed = mixed - id;
            }
            out = std::max(out, max_abs(mixed));
        }
    }
    return out;
}

DenseSpectrum::DenseSpectrum(const DenseOperator& h) : sites_(h.sites()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.dense());
    if (solver.info() != Eigen::Success) {
        throw NumericError("dense eigensolver did not converge");
    }
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

DenseState DenseSpectrum::evolve(const DenseState& state, double t) const {
    if (state.sites() != sites_) {
        throw StructuralError("state and Hamiltonian differ in size");
    }
    Eigen::MatrixXcd rot = vectors_.adjoint() * state.density() * vectors_;
    for (Eigen::Index i = 0; i < rot.rows(); ++i) {
        for (Eigen::Index j = 0; j < rot.cols(); ++j) {
            rot(i, j) *= std::polar(1.0, -t * (energies_(i) - energies_(j)));
        }
    }
    return DenseState(sites_, vectors_ * rot * vectors_.adjoint());
}

DenseState DenseSpectrum::eigenstate(double energy, double tolerance) const {
    Eigen::Index best = 0;
    (energies_.array() - energy).abs().minCoeff(&best);
    const double scale = std::max(1.0, std::abs(energy));
    if (std::abs(energies_(best) - energy) > 1e-6 * scale) {
        std::ostringstream os;
        os << "no dense eigenvalue near " << energy << " (closest " << energies_(best) << ")";
        throw NumericError(os.str());
    }
    const bool crowded_below = best > 0 && energies_(best) - energies_(best - 1) <= tolerance * scale;
    const bool crowded_above =
        best + 1 < energies_.size() && energies_(best + 1) - energies_(best) <= tolerance * scale;
    if (crowded_below || crowded_above) {
        throw DegeneracyError("many-body eigenvalue near " + std::to_string(energy) + " is not isolated");
    }
    return DenseState::from_vector(sites_, vectors_.col(best));
}

DenseState exact_evolution(const DenseOperator& h, const DenseState& state, double t) {
    return DenseSpectrum(h).evolve(state, t);
}

Eigen::MatrixXcd partial_trace(const DenseState& state, const Subinterval& block) {
    const std::size_t n = state.sites();
    block.check_within(n);
    const auto left_bits = static_cast<int>(block.a() - 1);
    const auto mid_bits = static_cast<int>(block.size());
    const auto right_bits = static_cast<int>(n - block.b());
    const Eigen::Index mid_dim = Eigen::Index{1} << mid_bits;
    const Eigen::Index left_dim = Eigen::Index{1} << left_bits;
    const Eigen::Index right_dim = Eigen::Index{1} << right_bits;
    const Eigen::MatrixXcd& rho = state.density();

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(mid_dim, mid_dim);
    for (Eigen::Index l = 0; l < left_dim; ++l) {
        for (Eigen::Index r = 0; r < right_dim; ++r) {
            const Eigen::Index base = (l << (mid_bits + right_bits)) | r;
            for (Eigen::Index m = 0; m < mid_dim; ++m) {
                for (Eigen::Index mp = 0; mp < mid_dim; ++mp) {
                    out(m, mp) += rho(base | (m << right_bits), base | (mp << right_bits));
                }
            }
        }
    }
    return out;
}

double exact_entropy(const DenseState& state, const Subinterval& block) {
    return entropy_of_density(partial_trace(state, block));
}

CorrelationMatrix exact_correlation_matrix(const DenseState& state) {
    const std::size_t n = state.sites();
    const auto comps = field_components(n);
    const auto dim = static_cast<Eigen::Index>(2 * n);
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index p = 0; p < dim; ++p) {
        for (Eigen::Index q = 0; q < dim; ++q) {
            g(p, q) = state.expectation(comps[static_cast<std::size_t>(p)] *
                                        comps[static_cast<std::size_t>(q)].adjoint());
        }
    }
    return CorrelationMatrix(std::move(g), Provenance::dense);
}

DenseState dense_eigenstate(const ChainParameters& params, const OccupationPattern& alpha) {
    const EigenSystem eig = diagonalize(build_anisotropic(params));
    eig.require_simple();
    return DenseSpectrum(build_hamiltonian(params)).eigenstate(eig.many_body_energy(alpha));
}

DenseState dense_eigenstate_product(const ChainParameters& params, const Partition& partition,
                                    const std::vector<OccupationPattern>& patterns) {
    const auto blocks = partition.blocks();
    if (patterns.size() != blocks.size()) {
        throw StructuralError("one pattern per block required");
    }
    std::vector<DenseState> factors;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        factors.push_back(dense_eigenstate(params.restricted(blocks[k]), patterns[k]));
    }
    return DenseState::product(factors);
}

WickReport verify_wick(const DenseState& state, const Eigen::MatrixXcd& weights) {
    const std::size_t n = state.sites();
    if (weights.cols() != static_cast<Eigen::Index>(2 * n)) {
        throw StructuralError("field weights must have 2n columns");
    }
    if (weights.rows() < 1 || weights.rows() > 8) {
        throw StructuralError("Wick check supports 1 to 8 field operators");
    }
    const auto comps = field_components(n);
    std::vector<DenseOperator> f;
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        f.push_back(field_operator(comps, weights.row(i)));
    }
    WickReport report;
    report.order = f.size();
    Eigen::MatrixXcd y = state.density();
    for (auto it = f.rbegin(); it != f.rend(); ++it) {
        y = it->matrix() * y;
    }
    report.moment = y.trace();
    if (f.size() % 2 == 0) {
        const auto m = static_cast<Eigen::Index>(f.size());
        Eigen::MatrixXcd pairs = Eigen::MatrixXcd::Zero(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index k = j + 1; k < m; ++k) {
                pairs(j, k) = state.expectation(f[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(k)]);
                pairs(k, j) = -pairs(j, k);
            }
        }
        report.pfaffian = pfaffian(pairs);
    }
    report.residual = std::abs(report.moment - report.pfaffian);
    return report;
}

ProductReport verify_product_quasifree(const ChainParameters& params, const Partition& partition,
                                       const std::vector<OccupationPattern>& patterns, std::uint64_t seed) {
    const std::size_t n = params.sites();
    guard(n, 8);
    const DenseState state = dense_eigenstate_product(params, partition, patterns);
    const CorrelationMatrix dense = exact_correlation_matrix(state);
    const CorrelationMatrix blocks = gamma_eigenstate_product(params, partition, patterns);

    ProductReport report;
    report.direct_sum_residual = (dense.entries() - blocks.entries()).cwiseAbs().maxCoeff();

    std::vector<std::size_t> owner(n);
    const auto parts = partition.blocks();
    for (std::size_t k = 0; k < parts.size(); ++k) {
        for (std::size_t j = parts[k].a(); j <= parts[k].b(); ++j) {
            owner[j - 1] = k;
        }
    }
    for (Eigen::Index p = 0; p < dense.entries().rows(); ++p) {
        for (Eigen::Index q = 0; q < dense.entries().cols(); ++q) {
            if (owner[static_cast<std::size_t>(p / 2)] != owner[static_cast<std::size_t>(q / 2)]) {
                report.cross_block = std::max(report.cross_block, std::abs(dense.entries()(p, q)));
            }
        }
    }

    Rng rng = make_rng(derive_seed(seed, "wick"));
    for (std::size_t m = 1; m <= 6; ++m) {
        const WickReport w = verify_wick(state, random_weights(m, n, rng));
        if (m % 2 == 0) {
            report.wick_residual = std::max(report.wick_residual, w.residual);
        } else {
            report.odd_moment = std::max(report.odd_moment, std::abs(w.moment));
        }
    }
    return report;
}

double EquivalenceReport::max_entropy_error() const {
    double out = 0.0;
    for (const auto& [family, err] : entropy_error) {
        out = std::max(out, err);
    }
    return out;
}

EquivalenceReport oracle_equivalence(const ChainParameters& params, const TimeGrid& grid, std::uint64_t seed) {
    const std::size_t n = params.sites();
    guard(n, 8);
    if (n < 2) {
        throw StructuralError("oracle equivalence needs at least two sites for a bipartition");
    }
    Rng rng = make_rng(derive_seed(seed, "oracle"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Subinterval half(1, n / 2);

    const EigenSystem eig = diagonalize(build_anisotropic(params));
    const DenseSpectrum dense(build_hamiltonian(params));
    EquivalenceReport report;

    auto compare_entropy = [&](const std::string& family, const DenseState& state, const CorrelationMatrix& gamma0) {
        double& err = report.entropy_error[family];
        for (double t : grid.times()) {
            const double ff = evolved_entropy(eig, gamma0, half, t);
            const double ex = exact_entropy(dense.evolve(state, t), half);
            err = std::max(err, std::abs(ff - ex));
            ++report.comparisons;
        }
    };

    std::vector<double> eta(n);
    for (auto& e : eta) {
        e = unit(rng);
    }
    const DensityProfile mixed(eta);
    compare_entropy("density_profile", DenseState::density_profile(mixed), gamma_density_profile(mixed));

    const OccupationPattern spins = OccupationPattern::random(n, rng);
    const DensityProfile updown = DensityProfile::from_bits(spins);
    compare_entropy("up_down", DenseState::basis(spins), gamma_density_profile(updown));

    // Two-block eigenstate product; both the conjugation path and the rank-factor engine are checked.
    const std::size_t cut = 2 + static_cast<std::size_t>(rng() % (n - 1));
    const Partition split = Partition::from_block_starts({1, cut}, n);
    const OccupationPattern global = OccupationPattern::random(n, rng);
    const auto block_patterns = split_pattern(global, split);
    const DenseState product = dense_eigenstate_product(params, split, block_patterns);
    compare_entropy("eigenstate_product", product, gamma_eigenstate_product(params, split, block_patterns));
    {
        const EntropySeries series = EntropyEvolution(params, split, half).run(global, grid);
        double& err = report.entropy_error["eigenstate_product_engine"];
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(series.entropy[i] - exact_entropy(dense.evolve(product, grid[i]), half)));
            ++report.comparisons;
        }
    }

    const OccupationPattern alpha = OccupationPattern::random(n, rng);
    compare_entropy("full_eigenstate", dense_eigenstate(params, alpha),
                    spectral_projection(eig, alpha));

    if (params.isotropic()) {
        const EigenSystem iso = diagonalize(build_isotropic(params));
        const std::size_t a = 1 + static_cast<std::size_t>(rng() % n);
        const std::size_t b = a + static_cast<std::size_t>(rng() % (n - a + 1));
        const SiteSet s(Subinterval(a, b));
        const DenseOperator count = number_operator(n, s);
        double err = 0.0;
        for (const DensityProfile* profile : {&mixed, &updown}) {
            const DenseState state = DenseState::density_profile(*profile);
            for (double t : grid.times()) {
                const double ff = transport_expectation(iso, *profile, s, t);
                const double ex = dense.evolve(state, t).expectation(count).real();
                err = std::max(err, std::abs(ff - ex));
                ++report.comparisons;
            }
        }
        report.transport_error = err;
    }
    return report;
}

}  // namespace xylab
