#include "xylab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "xylab/error.hpp"

namespace xylab {

namespace {

bool is_tridiagonal(const Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(i - j) > 1 && m(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

std::string fingerprint(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os << "dim=" << m.rows() << " frobenius=" << m.norm() << " trace=" << m.trace();
    return os.str();
}

double relative_tolerance(const EigenSystem& eig) { return kDegeneracyTolerance * std::max(1.0, eig.scale()); }

}  // namespace

EigenSystem::EigenSystem(Flavor flavor, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors, double e0)
    : flavor_(flavor),
      sites_(static_cast<std::size_t>(eigenvalues.size()) / (flavor == Flavor::isotropic ? 1 : 2)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      e0_(e0) {
    const auto n = static_cast<Eigen::Index>(sites_);
    lambda_.resize(n);
    if (flavor_ == Flavor::isotropic) {
        lambda_ = eigenvalues_.cwiseAbs();
        std::sort(lambda_.begin(), lambda_.end());
        return;
    }
    const double tol = kPairingTolerance * std::max(1.0, scale());
    for (Eigen::Index j = 0; j < n; ++j) {
        const double plus = eigenvalues_(n + j);
        const double minus = eigenvalues_(n - 1 - j);
        if (std::abs(plus + minus) > tol) {
            throw StructuralError("spectrum of M is not symmetric: pair " + std::to_string(j) + " has sum " +
                                  std::to_string(plus + minus));
        }
        lambda_(j) = 0.5 * (plus - minus);
    }
}

Eigen::Index EigenSystem::plus_column(std::size_t mode) const {
    if (mode >= sites_) {
        throw IndexError("mode index out of range");
    }
    const auto n = static_cast<Eigen::Index>(sites_);
    return flavor_ == Flavor::isotropic ? static_cast<Eigen::Index>(mode) : n + static_cast<Eigen::Index>(mode);
}

Eigen::Index EigenSystem::minus_column(std::size_t mode) const {
    if (flavor_ == Flavor::isotropic) {
        throw StructuralError("A has no paired spectrum");
    }
    if (mode >= sites_) {
        throw IndexError("mode index out of range");
    }
    return static_cast<Eigen::Index>(sites_) - 1 - static_cast<Eigen::Index>(mode);
}

Eigen::MatrixXd EigenSystem::bogoliubov() const {
    if (flavor_ == Flavor::isotropic) {
        throw StructuralError("Bogoliubov transform is defined for M only");
    }
    const auto n = static_cast<Eigen::Index>(sites_);
    Eigen::MatrixXd w(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto u = eigenvectors_.col(plus_column(static_cast<std::size_t>(j)));
        w.row(2 * j) = u.transpose();
        for (Eigen::Index s = 0; s < n; ++s) {
            w(2 * j + 1, 2 * s) = u(2 * s + 1);
            w(2 * j + 1, 2 * s + 1) = u(2 * s);
        }
    }
    return w;
}

double EigenSystem::scale() const noexcept {
    if (eigenvalues_.size() == 0) {
        return 0.0;
    }
    return std::max(std::abs(eigenvalues_(0)), std::abs(eigenvalues_(eigenvalues_.size() - 1)));
}

double EigenSystem::min_gap() const noexcept {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < eigenvalues_.size(); ++i) {
        gap = std::min(gap, eigenvalues_(i) - eigenvalues_(i - 1));
    }
    return gap;
}

bool EigenSystem::is_simple() const noexcept { return min_gap() > relative_tolerance(*this); }

void EigenSystem::require_simple() const {
    if (!is_simple()) {
        std::ostringstream os;
        os << "spectrum is degenerate: minimal gap " << min_gap() << " at scale " << scale();
        throw DegeneracyError(os.str());
    }
}

double EigenSystem::many_body_energy(const OccupationPattern& alpha) const {
    if (alpha.size() != sites_) {
        throw StructuralError("pattern length does not match chain length");
    }
    double e = -lambda_.sum();
    for (std::size_t j = 0; j < sites_; ++j) {
        if (alpha[j]) {
            e += 2.0 * lambda_(static_cast<Eigen::Index>(j));
        }
    }
    return e;
}

std::vector<double> EigenSystem::many_body_spectrum() const {
    if (sites_ > 20) {
        throw SizeGuardError("many-body spectrum limited to n <= 20");
    }
    const std::uint64_t count = std::uint64_t{1} << sites_;
    std::vector<double> out(count);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        out[idx] = many_body_energy(OccupationPattern::from_index(idx, sites_));
    }
    std::sort(out.begin(), out.end());
    return out;
}

EigenSystem diagonalize(const BlockMatrix& matrix) {
    const Eigen::MatrixXd& m = matrix.entries();
    double e0 = 0.0;
    if (matrix.flavor() == Flavor::isotropic) {
        e0 = -m.trace();
    } else {
        for (Eigen::Index j = 0; j < m.rows(); j += 2) {
            e0 -= m(j, j);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (matrix.flavor() == Flavor::isotropic && is_tridiagonal(m)) {
        Eigen::VectorXd diag = m.diagonal();
        Eigen::VectorXd sub = m.rows() > 1 ? Eigen::VectorXd(m.diagonal(-1)) : Eigen::VectorXd(0);
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    } else {
        solver.compute(m, Eigen::ComputeEigenvectors);
    }
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigensolver did not converge: " + fingerprint(m));
    }
    return EigenSystem(matrix.flavor(), solver.eigenvalues(), solver.eigenvectors(), e0);
}

Eigen::MatrixXd projection_basis(const EigenSystem& eig, const OccupationPattern& pattern) {
    if (eig.flavor() != Flavor::anisotropic) {
        throw StructuralError("spectral projections require the anisotropic matrix M");
    }
    if (pattern.size() != eig.sites()) {
        throw StructuralError("pattern length " + std::to_string(pattern.size()) + " does not match chain length " +
                              std::to_string(eig.sites()));
    }
    const auto n = static_cast<Eigen::Index>(eig.sites());
    Eigen::MatrixXd basis(2 * n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto mode = static_cast<std::size_t>(j);
        basis.col(j) = eig.eigenvectors().col(pattern[mode] ? eig.minus_column(mode) : eig.plus_column(mode));
    }
    return basis;
}

CorrelationMatrix spectral_projection(const EigenSystem& eig, const OccupationPattern& pattern) {
    Eigen::MatrixXd basis = projection_basis(eig, pattern);
    eig.require_simple();
    Eigen::MatrixXd p = basis * basis.transpose();
    return CorrelationMatrix(p.cast<std::complex<double>>(), Provenance::projection);
}

Eigen::MatrixXcd matrix_function(const EigenSystem& eig, const ScalarFunction& g) {
    const Eigen::MatrixXd& v = eig.eigenvectors();
    Eigen::VectorXcd values(eig.eigenvalues().size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        values(i) = g(eig.eigenvalues()(i));
    }
    Eigen::MatrixXcd vc = v.cast<std::complex<double>>();
    return vc * values.asDiagonal() * v.transpose();
}

double spectral_norm_2x2(const Eigen::Matrix2cd& b) {
    // largest eigenvalue of B^* B = [[p, q], [q^*, r]]; no cancellation when the singular values coincide
    const double p = std::norm(b(0, 0)) + std::norm(b(1, 0));
    const double r = std::norm(b(0, 1)) + std::norm(b(1, 1));
    const std::complex<double> q = std::conj(b(0, 0)) * b(0, 1) + std::conj(b(1, 0)) * b(1, 1);
    return std::sqrt(0.5 * (p + r) + std::hypot(0.5 * (p - r), std::abs(q)));
}

Eigen::MatrixXd eigencorrelator(const EigenSystem& eig) {
    const auto n = static_cast<Eigen::Index>(eig.sites());
    const auto bs = static_cast<Eigen::Index>(eig.block_size());
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const double tol = relative_tolerance(eig);

    // Simple eigenvalues: ||(v v^T)_jk|| = |v_j| |v_k| for the site blocks v_j.
    std::vector<Eigen::Index> simple;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;
    Eigen::Index start = 0;
    const Eigen::Index dim = ev.size();
    for (Eigen::Index i = 1; i <= dim; ++i) {
        if (i == dim || ev(i) - ev(i - 1) > tol) {
            if (i - start == 1) {
                simple.push_back(start);
            } else {
                groups.emplace_back(start, i - start);
            }
            start = i;
        }
    }

    Eigen::MatrixXd norms(n, static_cast<Eigen::Index>(simple.size()));
    for (Eigen::Index c = 0; c < norms.cols(); ++c) {
        const auto col = v.col(simple[static_cast<std::size_t>(c)]);
        for (Eigen::Index j = 0; j < n; ++j) {
            norms(j, c) = col.segment(j * bs, bs).norm();
        }
    }
    Eigen::MatrixXd q = norms * norms.transpose();

    for (const auto& [first, count] : groups) {
        const auto vg = v.middleCols(first, count);
        const Eigen::MatrixXd p = vg * vg.transpose();
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < n; ++k) {
                if (bs == 1) {
                    q(j, k) += std::abs(p(j, k));
                } else {
                    q(j, k) += spectral_norm_2x2(p.block<2, 2>(2 * j, 2 * k).cast<std::complex<double>>());
                }
            }
        }
    }
    return q;
}

CorrelatorProfile CorrelatorProfile::from_mean_matrix(const Eigen::MatrixXd& mean_q, std::size_t samples) {
    const Eigen::Index n = mean_q.rows();
    CorrelatorProfile p;
    p.samples = samples;
    p.q_max.assign(static_cast<std::size_t>(n), 0.0);
    p.q_mean.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(n), 0);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto r = static_cast<std::size_t>(std::abs(j - k));
            p.q_max[r] = std::max(p.q_max[r], mean_q(j, k));
            p.q_mean[r] += mean_q(j, k);
            ++counts[r];
        }
    }
    for (std::size_t r = 0; r < p.q_mean.size(); ++r) {
        p.q_mean[r] /= static_cast<double>(counts[r]);
    }
    return p;
}

const char* to_string(DecayModel m) noexcept { return m == DecayModel::exponential ? "exponential" : "power"; }

namespace {

constexpr double kUnderflowFloor = 1e-15;

DecayFit least_squares(const std::vector<double>& x, const std::vector<double>& y, DecayModel model) {
    const auto count = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) {
        throw NumericError("decay fit needs at least two distinct distances");
    }
    DecayFit fit;
    fit.model = model;
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (intercept + fit.slope * x[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / count);
    fit.slope_error = x.size() > 2 ? std::sqrt(ss / (count - 2.0) / sxx) : std::numeric_limits<double>::quiet_NaN();
    fit.amplitude = std::exp(intercept);
    fit.parameter = model == DecayModel::exponential ? -1.0 / fit.slope : -fit.slope;
    fit.points = x.size();
    return fit;
}

double abscissa(double r, DecayModel model) { return model == DecayModel::exponential ? r : std::log1p(r); }

}  // namespace

DecayFit fit_decay(const CorrelatorProfile& profile, DecayModel model, std::size_t r_lo, std::size_t r_hi) {
    if (r_lo > r_hi || r_hi >= profile.size()) {
        throw IndexError("fit window [" + std::to_string(r_lo) + ", " + std::to_string(r_hi) +
                         "] outside profile of size " + std::to_string(profile.size()));
    }
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t r = r_lo; r <= r_hi; ++r) {
        const double q = profile.q_max[r];
        if (q >= kUnderflowFloor) {
            x.push_back(abscissa(static_cast<double>(r), model));
            y.push_back(std::log(q));
        }
    }
    if (x.empty()) {
        throw UnderflowError("all correlator values in the fit window are below 1e-15");
    }
    if (x.size() < 4) {
        throw NumericError("decay fit needs at least 4 usable points, got " + std::to_string(x.size()));
    }
    DecayFit fit = least_squares(x, y, model);
    fit.r_lo = r_lo;
    fit.r_hi = r_hi;
    return fit;
}

DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& y, DecayModel model) {
    if (r.size() != y.size()) {
        throw StructuralError("fit abscissa and ordinate differ in length");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (y[i] > 0.0) {
            xs.push_back(abscissa(r[i], model));
            ys.push_back(std::log(y[i]));
        }
    }
    if (xs.size() < 2) {
        throw NumericError("decay fit needs at least two positive values");
    }
    DecayFit fit = least_squares(xs, ys, model);
    fit.r_lo = static_cast<std::size_t>(*std::min_element(r.begin(), r.end()));
    fit.r_hi = static_cast<std::size_t>(*std::max_element(r.begin(), r.end()));
    return fit;
}

}  // namespace xylab
