#include "xylab/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "xylab/error.hpp"

namespace xylab {

namespace {

using cd = std::complex<double>;

Eigen::VectorXcd phases(const Eigen::VectorXd& energies, double t) {
    Eigen::VectorXcd out(energies.size());
    for (Eigen::Index i = 0; i < energies.size(); ++i) {
        out(i) = std::polar(1.0, -2.0 * t * energies(i));
    }
    return out;
}

/// Eigenvalues of K K^*, obtained from whichever Gram matrix is smaller; missing ones are zero.
std::vector<double> gram_eigenvalues(const Eigen::MatrixXcd& k) {
    const Eigen::Index rows = k.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    if (k.cols() < rows) {
        solver.compute(k.adjoint() * k, Eigen::EigenvaluesOnly);
    } else {
        solver.compute(k * k.adjoint(), Eigen::EigenvaluesOnly);
    }
    if (solver.info() != Eigen::Success) {
        throw NumericError("Hermitian eigensolver did not converge on a subsystem correlation matrix");
    }
    std::vector<double> out(static_cast<std::size_t>(rows), 0.0);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    const Eigen::Index offset = rows - ev.size();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        out[static_cast<std::size_t>(offset + i)] = ev(i);
    }
    return out;
}

double clamp_unit(double p) {
    if (p < -kClampTolerance || p > 1.0 + kClampTolerance || std::isnan(p)) {
        std::ostringstream os;
        os << "correlation eigenvalue " << p << " outside [0, 1] beyond tolerance";
        throw StateCorruptionError(os.str());
    }
    return std::clamp(p, 0.0, 1.0);
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

CorrelationMatrix gamma_density_profile(const DensityProfile& profile) {
    const auto n = static_cast<Eigen::Index>(profile.sites());
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double eta = profile.eta()[static_cast<std::size_t>(j)];
        g(2 * j, 2 * j) = 1.0 - eta;
        g(2 * j + 1, 2 * j + 1) = eta;
    }
    return CorrelationMatrix(std::move(g), Provenance::density_profile);
}

BlockSpectra::BlockSpectra(const ChainParameters& params, const Partition& partition) : partition_(partition) {
    if (params.sites() != partition.sites()) {
        throw StructuralError("partition covers " + std::to_string(partition.sites()) + " sites but the chain has " +
                              std::to_string(params.sites()));
    }
    for (const auto& b : partition_.blocks()) {
        spectra_.push_back(diagonalize(build_anisotropic(params.restricted(b))));
    }
}

Eigen::MatrixXd BlockSpectra::projection_basis(const std::vector<OccupationPattern>& patterns) const {
    if (patterns.size() != spectra_.size()) {
        throw StructuralError("expected " + std::to_string(spectra_.size()) + " block patterns, got " +
                              std::to_string(patterns.size()));
    }
    const auto n = static_cast<Eigen::Index>(sites());
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * n, n);
    const auto blocks = partition_.blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (patterns[k].size() != blocks[k].size()) {
            throw StructuralError("pattern for block " + std::to_string(k + 1) + " has length " +
                                  std::to_string(patterns[k].size()) + ", block has " +
                                  std::to_string(blocks[k].size()) + " sites");
        }
        spectra_[k].require_simple();
        const auto off = static_cast<Eigen::Index>(blocks[k].a() - 1);
        const auto len = static_cast<Eigen::Index>(blocks[k].size());
        basis.block(2 * off, off, 2 * len, len) = xylab::projection_basis(spectra_[k], patterns[k]);
    }
    return basis;
}

Eigen::MatrixXd BlockSpectra::projection_basis(const OccupationPattern& global) const {
    return projection_basis(split_pattern(global, partition_));
}

CorrelationMatrix gamma_eigenstate_product(const ChainParameters& params, const Partition& partition,
                                           const std::vector<OccupationPattern>& patterns) {
    const BlockSpectra spectra(params, partition);
    const Eigen::MatrixXd p = spectra.projection_basis(patterns);
    Eigen::MatrixXd g = p * p.transpose();
    return CorrelationMatrix(g.cast<cd>(), Provenance::projection);
}

CorrelationMatrix restrict_gamma(const CorrelationMatrix& gamma, const Subinterval& block) {
    block.check_within(gamma.sites());
    const auto off = static_cast<Eigen::Index>(2 * (block.a() - 1));
    const auto len = static_cast<Eigen::Index>(2 * block.size());
    return CorrelationMatrix(gamma.entries().block(off, off, len, len), Provenance::restricted);
}

EntropySpectrum entropy_from_eigenvalues(std::vector<double> eigenvalues) {
    EntropySpectrum out;
    for (double& e : eigenvalues) {
        e = clamp_unit(e);
    }
    std::sort(eigenvalues.begin(), eigenvalues.end());
    const std::size_t m = eigenvalues.size();
    for (std::size_t i = 0; i < m; ++i) {
        out.entropy -= xlogx(eigenvalues[i]);
        out.trace += eigenvalues[i];
        out.pairing_defect = std::max(out.pairing_defect, std::abs(eigenvalues[i] + eigenvalues[m - 1 - i] - 1.0));
    }
    out.xi.assign(eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(m / 2));
    out.eigenvalues = std::move(eigenvalues);
    return out;
}

EntropySpectrum entanglement_entropy(const CorrelationMatrix& gamma1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gamma1.entries(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Hermitian eigensolver did not converge on a correlation matrix");
    }
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return entropy_from_eigenvalues(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

double binary_entropy(double p) {
    p = clamp_unit(p);
    return -xlogx(p) - xlogx(1.0 - p);
}

double entropy_upper_diagnostic(const CorrelationMatrix& gamma, const Subinterval& block) {
    const std::size_t n = gamma.sites();
    block.check_within(n);
    const Eigen::MatrixXcd& g = gamma.entries();
    double sum = 0.0;
    for (std::size_t l = block.a(); l <= block.b(); ++l) {
        for (std::size_t lp = 1; lp <= n; ++lp) {
            if (block.contains(lp)) {
                continue;
            }
            const auto r = static_cast<Eigen::Index>(2 * (l - 1));
            const auto c = static_cast<Eigen::Index>(2 * (lp - 1));
            sum += spectral_norm_2x2(g.block<2, 2>(r, c));
        }
    }
    return 2.0 * std::log(2.0) * sum;
}

PatternBattery pattern_battery(std::size_t n, std::size_t random_count, std::uint64_t seed,
                               std::size_t exhaustive_limit) {
    PatternBattery out;
    if (n <= exhaustive_limit) {
        out.exhaustive = true;
        const std::uint64_t count = std::uint64_t{1} << n;
        out.patterns.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            out.patterns.push_back(OccupationPattern::from_index(i, n));
        }
        return out;
    }
    out.patterns = {OccupationPattern::zeros(n), OccupationPattern::ones(n), OccupationPattern::alternating(n)};
    Rng rng = make_rng(derive_seed(seed, "patterns"));
    for (std::size_t i = 0; i < random_count; ++i) {
        out.patterns.push_back(OccupationPattern::random(n, rng));
    }
    return out;
}

EntropyEvolution::EntropyEvolution(const ChainParameters& params, const Partition& partition,
                                   const Subinterval& block, SweepOptions options)
    : partition_(partition), block_(block), options_(options) {
    if (params.sites() != partition.sites()) {
        throw StructuralError("partition and chain differ in length");
    }
    block_.check_within(params.sites());
    isotropic_ = params.isotropic() && !options_.force_general;
    if (!isotropic_) {
        global_ = diagonalize(build_anisotropic(params));
        blocks_.emplace(params, partition);
        return;
    }
    global_ = diagonalize(build_isotropic(params));
    for (const auto& b : partition_.blocks()) {
        const EigenSystem local = diagonalize(build_isotropic(params.restricted(b)));
        const Eigen::VectorXd& eps = local.eigenvalues();
        // The block's M spectrum is {eps} together with {-eps}; it must be simple.
        std::vector<double> paired;
        for (Eigen::Index i = 0; i < eps.size(); ++i) {
            paired.push_back(eps(i));
            paired.push_back(-eps(i));
        }
        std::sort(paired.begin(), paired.end());
        const double tol = kDegeneracyTolerance * std::max(1.0, paired.back());
        SectorBlock sector;
        sector.vectors = local.eigenvectors();
        for (std::size_t i = 1; i < paired.size(); ++i) {
            if (paired[i] - paired[i - 1] <= tol) {
                sector.vectors.resize(0, 0);  // marks the block as degenerate
                break;
            }
        }
        sector.order.resize(static_cast<std::size_t>(eps.size()));
        std::iota(sector.order.begin(), sector.order.end(), Eigen::Index{0});
        std::stable_sort(sector.order.begin(), sector.order.end(),
                         [&](Eigen::Index x, Eigen::Index y) { return std::abs(eps(x)) < std::abs(eps(y)); });
        for (Eigen::Index col : sector.order) {
            sector.positive.push_back(eps(col) > 0.0);
        }
        sectors_.push_back(std::move(sector));
    }
}

EntropySeries EntropyEvolution::run(const OccupationPattern& global, const TimeGrid& grid) const {
    if (global.size() != partition_.sites()) {
        throw StructuralError("pattern length does not match chain length");
    }
    EntropySeries s = isotropic_ ? run_isotropic(global, grid) : run_general(global, grid);
    for (std::size_t i = 0; i < s.entropy.size(); ++i) {
        if (i == 0 || s.entropy[i] > s.max_entropy) {
            s.max_entropy = s.entropy[i];
            s.argmax_t = grid[i];
        }
    }
    return s;
}

EntropySeries EntropyEvolution::run_general(const OccupationPattern& global, const TimeGrid& grid) const {
    const Eigen::MatrixXd p = blocks_->projection_basis(global);
    const Eigen::MatrixXd& v = global_->eigenvectors();
    const Eigen::MatrixXcd b = (v.transpose() * p).cast<cd>();
    const Eigen::MatrixXcd vc = v.cast<cd>();
    const auto off = static_cast<Eigen::Index>(2 * (block_.a() - 1));
    const auto len = static_cast<Eigen::Index>(2 * block_.size());
    const Eigen::Index dim = v.rows();

    EntropySeries s;
    Eigen::MatrixXcd k_all(dim, b.cols());
    for (double t : grid.times()) {
        k_all.noalias() = vc * (phases(global_->eigenvalues(), t).asDiagonal() * b);
        const Eigen::MatrixXcd k_in = k_all.middleRows(off, len);
        s.entropy.push_back(entropy_from_eigenvalues(gram_eigenvalues(k_in)).entropy);
        if (options_.diagnostic) {
            const Eigen::MatrixXcd cross = k_in * k_all.adjoint();
            double sum = 0.0;
            for (Eigen::Index l = 0; l < len; l += 2) {
                for (Eigen::Index c = 0; c < dim; c += 2) {
                    if (c >= off && c < off + len) {
                        continue;
                    }
                    sum += spectral_norm_2x2(cross.block<2, 2>(l, c));
                }
            }
            s.diagnostic.push_back(2.0 * std::log(2.0) * sum);
        }
    }
    return s;
}

EntropySeries EntropyEvolution::run_isotropic(const OccupationPattern& global, const TimeGrid& grid) const {
    const auto n = static_cast<Eigen::Index>(partition_.sites());
    const auto blocks = partition_.blocks();
    std::vector<Eigen::VectorXd> columns;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const SectorBlock& sector = sectors_[k];
        if (sector.vectors.size() == 0) {
            throw DegeneracyError("block " + std::to_string(k + 1) + " has a degenerate one-particle spectrum");
        }
        const auto off = static_cast<Eigen::Index>(blocks[k].a() - 1);
        for (std::size_t j = 0; j < sector.order.size(); ++j) {
            const bool occupied = global[blocks[k].a() - 1 + j];
            // The particle sector holds the selected mode when alpha_j = 0 meets a positive eigenvalue or
            // alpha_j = 1 meets a negative one.
            if (occupied != sector.positive[j]) {
                Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
                col.segment(off, sector.vectors.rows()) = sector.vectors.col(sector.order[j]);
                columns.push_back(std::move(col));
            }
        }
    }

    EntropySeries s;
    const auto off = static_cast<Eigen::Index>(block_.a() - 1);
    const auto len = static_cast<Eigen::Index>(block_.size());
    if (columns.empty()) {
        s.entropy.assign(grid.size(), 0.0);
        if (options_.diagnostic) {
            s.diagnostic.assign(grid.size(), 0.0);
        }
        return s;
    }
    Eigen::MatrixXd q(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        q.col(static_cast<Eigen::Index>(c)) = columns[c];
    }
    const Eigen::MatrixXd& v = global_->eigenvectors();
    const Eigen::MatrixXcd b = (v.transpose() * q).cast<cd>();
    const Eigen::MatrixXcd vc = v.cast<cd>();

    Eigen::MatrixXcd k_all(n, b.cols());
    for (double t : grid.times()) {
        k_all.noalias() = vc * (phases(global_->eigenvalues(), t).asDiagonal() * b);
        const Eigen::MatrixXcd k_in = k_all.middleRows(off, len);
        double entropy = 0.0;
        for (double p : gram_eigenvalues(k_in)) {
            entropy += binary_entropy(p);
        }
        s.entropy.push_back(entropy);
        if (options_.diagnostic) {
            const Eigen::MatrixXcd cross = k_in * k_all.adjoint();
            double sum = 0.0;
            for (Eigen::Index c = 0; c < n; ++c) {
                if (c >= off && c < off + len) {
                    continue;
                }
                sum += cross.col(c).cwiseAbs().sum();
            }
            s.diagnostic.push_back(2.0 * std::log(2.0) * sum);
        }
    }
    return s;
}

SweepResult evolved_entropy_sweep(const ChainParameters& params, const Partition& partition,
                                  const std::vector<OccupationPattern>& patterns, const Subinterval& block,
                                  const TimeGrid& grid, SweepOptions options) {
    const EntropyEvolution engine(params, partition, block, options);
    SweepResult out;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        out.series.push_back(engine.run(patterns[i], grid));
        const EntropySeries& s = out.series.back();
        if (i == 0 || s.max_entropy > out.max_entropy) {
            out.max_entropy = s.max_entropy;
            out.argmax_pattern = i;
            out.argmax_t = s.argmax_t;
        }
    }
    return out;
}

double evolved_entropy(const EigenSystem& global, const CorrelationMatrix& gamma0, const Subinterval& block, double t) {
    if (global.flavor() != Flavor::anisotropic) {
        throw StructuralError("correlation matrices evolve under M");
    }
    const CorrelationMatrix gt = evolve_correlation(gamma0, propagator(global, t));
    return entanglement_entropy(restrict_gamma(gt, block)).entropy;
}

}  // namespace xylab
