#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "xylab/correlation.hpp"
#include "xylab/model.hpp"

namespace xylab {

/// Relative tolerance below which two eigenvalues count as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-10;
/// Relative tolerance for the +lambda / -lambda pairing of M.
inline constexpr double kPairingTolerance = 1e-8;

/// Full eigendecomposition of A or M.
///
/// For M the spectrum is paired: eigenvalue +lambda_j sits in column
/// plus_column(j), -lambda_j in minus_column(j), with 0 <= lambda_1 <= ... <= lambda_n.
class EigenSystem {
public:
    EigenSystem(Flavor flavor, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors, double e0);

    Flavor flavor() const noexcept { return flavor_; }
    std::size_t sites() const noexcept { return sites_; }
    std::size_t block_size() const noexcept { return flavor_ == Flavor::isotropic ? 1 : 2; }
    /// Ascending.
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    /// Orthonormal columns matching eigenvalues().
    const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }

    /// Paired one-particle energies lambda_j >= 0, ascending. For flavor A these are |eigenvalues| sorted.
    const Eigen::VectorXd& lambda() const noexcept { return lambda_; }
    Eigen::Index plus_column(std::size_t mode) const;
    Eigen::Index minus_column(std::size_t mode) const;

    /// Real Bogoliubov matrix W with W M W^T = diag(lambda_1, -lambda_1, ..., lambda_n, -lambda_n).
    /// Row 2j is the +lambda_j eigenvector u, row 2j+1 is J u. Flavor M only.
    Eigen::MatrixXd bogoliubov() const;

    /// E_0 = sum_j nu_j.
    double e0() const noexcept { return e0_; }
    /// E_1 = sum_j lambda_j.
    double e1() const noexcept { return lambda_.sum(); }

    double scale() const noexcept;
    double min_gap() const noexcept;
    bool is_simple() const noexcept;
    /// Throws DegeneracyError when the spectrum is not simple.
    void require_simple() const;

    /// E_alpha = 2 sum_{alpha_j = 1} lambda_j - sum_j lambda_j.
    double many_body_energy(const OccupationPattern& alpha) const;
    /// All 2^n values of E_alpha, sorted; n <= 20.
    std::vector<double> many_body_spectrum() const;

private:
    Flavor flavor_;
    std::size_t sites_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    Eigen::VectorXd lambda_;
    double e0_;
};

EigenSystem diagonalize(const BlockMatrix& matrix);

/// Orthonormal basis (2n x n) of the spectral subspace for Delta_alpha:
/// column j is the +lambda_j eigenvector if alpha_j = 0, otherwise the -lambda_j one.
Eigen::MatrixXd projection_basis(const EigenSystem& eig, const OccupationPattern& pattern);

/// chi_{Delta_alpha}(M), the correlation matrix of the eigenstate psi_alpha.
CorrelationMatrix spectral_projection(const EigenSystem& eig, const OccupationPattern& pattern);

using ScalarFunction = std::function<std::complex<double>(double)>;

/// V g(Lambda) V^T.
Eigen::MatrixXcd matrix_function(const EigenSystem& eig, const ScalarFunction& g);

/// Q_jk = sum over eigenprojections P_E of the spectral norm of the (j,k) site block of P_E.
/// Degenerate eigenvalues are grouped into a single projection.
Eigen::MatrixXd eigencorrelator(const EigenSystem& eig);

/// Disorder-averaged eigencorrelator reduced to a function of distance.
struct CorrelatorProfile {
    std::vector<double> q_max;   ///< max over pairs with |j-k| = r of E[Q_jk]
    std::vector<double> q_mean;  ///< mean over the same pairs
    std::size_t samples = 0;

    std::size_t size() const noexcept { return q_max.size(); }
    /// q_max[r], zero beyond the stored range.
    double at(std::size_t r) const noexcept { return r < q_max.size() ? q_max[r] : 0.0; }

    static CorrelatorProfile from_mean_matrix(const Eigen::MatrixXd& mean_q, std::size_t samples);
};

enum class DecayModel { exponential, power };

const char* to_string(DecayModel m) noexcept;

struct DecayFit {
    DecayModel model = DecayModel::exponential;
    double amplitude = 0.0;  ///< C
    double parameter = 0.0;  ///< xi (exponential) or beta (power)
    double slope = 0.0;      ///< d log Q / dx with x = r or log(1+r)
    double slope_error = 0.0;
    double residual = 0.0;   ///< RMS residual in log space
    std::size_t r_lo = 0;
    std::size_t r_hi = 0;
    std::size_t points = 0;
};

/// Least-squares fit of log Q(r) over r in [r_lo, r_hi] to log C - r/xi or log C - beta log(1+r).
DecayFit fit_decay(const CorrelatorProfile& profile, DecayModel model, std::size_t r_lo, std::size_t r_hi);

/// Same fit on arbitrary (x, y) samples; needs at least two positive y.
DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& y, DecayModel model);

/// Spectral norm of a 2x2 complex matrix.
double spectral_norm_2x2(const Eigen::Matrix2cd& b);

}  // namespace xylab
