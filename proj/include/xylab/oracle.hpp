#pragma once

// Brute-force many-body reference in the full 2^n space.
//
// Basis: local index 0 is spin up e_1 = (1, 0), index 1 is spin down. Site 1 is
// the leftmost tensor factor, i.e. the most significant bit of a basis index.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "xylab/correlation.hpp"
#include "xylab/dynamics.hpp"
#include "xylab/model.hpp"
#include "xylab/spectral.hpp"

namespace xylab {

inline constexpr std::size_t kDenseSiteLimit = 12;
inline constexpr std::size_t kQuadraticFormSiteLimit = 10;

using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

/// Operator on (C^2)^{(x) n}, stored sparse.
class DenseOperator {
public:
    DenseOperator(std::size_t sites, SparseOperator matrix);

    std::size_t sites() const noexcept { return sites_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    const SparseOperator& matrix() const noexcept { return matrix_; }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }
    DenseOperator adjoint() const;

private:
    std::size_t sites_;
    SparseOperator matrix_;
};

DenseOperator operator*(const DenseOperator& x, const DenseOperator& y);
DenseOperator operator+(const DenseOperator& x, const DenseOperator& y);
DenseOperator operator-(const DenseOperator& x, const DenseOperator& y);
DenseOperator operator*(std::complex<double> s, const DenseOperator& x);

/// max |X_ij|
double max_abs(const DenseOperator& x);

/// Density matrix on 2^n.
class DenseState {
public:
    DenseState(std::size_t sites, Eigen::MatrixXcd density);
    static DenseState from_vector(std::size_t sites, const Eigen::VectorXcd& psi);
    /// Basis state with spin up where `up` has a 1.
    static DenseState basis(const OccupationPattern& up);
    /// Product state with <a_j^* a_j> = eta_j.
    static DenseState density_profile(const DensityProfile& profile);
    /// Tensor product in site order.
    static DenseState product(const std::vector<DenseState>& factors);

    std::size_t sites() const noexcept { return sites_; }
    const Eigen::MatrixXcd& density() const noexcept { return density_; }
    double trace_defect() const;
    std::complex<double> expectation(const DenseOperator& x) const;

private:
    std::size_t sites_;
    Eigen::MatrixXcd density_;
};

/// Operator acting as `local` on one site (1-based) and as identity elsewhere.
DenseOperator site_operator(std::size_t n, std::size_t site, const Eigen::Matrix2cd& local);
DenseOperator identity_operator(std::size_t n);
DenseOperator pauli_x(std::size_t n, std::size_t site);
DenseOperator pauli_y(std::size_t n, std::size_t site);
DenseOperator pauli_z(std::size_t n, std::size_t site);
/// a = [[0, 0], [1, 0]]; a^* a projects on spin up.
DenseOperator lowering(std::size_t n, std::size_t site);
/// sum_{j in S} a_j^* a_j
DenseOperator number_operator(std::size_t n, const SiteSet& s);

DenseOperator build_hamiltonian(const ChainParameters& params);
/// c_j = sigma^z_1 ... sigma^z_{j-1} a_j for j = 1..n.
std::vector<DenseOperator> build_jordan_wigner(std::size_t n);
/// (c_1, c_1^*, ..., c_n, c_n^*)
std::vector<DenseOperator> field_components(std::size_t n);

struct QuadraticFormReport {
    double anisotropic_residual = 0.0;          ///< max |H - C^* M C|
    std::optional<double> isotropic_residual;   ///< max |H - (2 c^* A c + E_0)| when gamma = 0
};

QuadraticFormReport verify_quadratic_form(const ChainParameters& params);
/// Compares H built from `params` against C^* m C for a caller-supplied M.
QuadraticFormReport verify_quadratic_form(const ChainParameters& params, const BlockMatrix& m);

/// Largest entrywise defect of {c_j, c_k} = 0 and {c_j, c_k^*} = delta_jk.
double car_defect(const std::vector<DenseOperator>& c);

/// Full eigendecomposition of H, reused for exact propagation and eigenstate lookup.
class DenseSpectrum {
public:
    explicit DenseSpectrum(const DenseOperator& h);

    std::size_t sites() const noexcept { return sites_; }
    const Eigen::VectorXd& energies() const noexcept { return energies_; }
    const Eigen::MatrixXcd& vectors() const noexcept { return vectors_; }
    /// e^{-itH} rho e^{itH}
    DenseState evolve(const DenseState& state, double t) const;
    /// Eigenvector of the unique eigenvalue closest to `energy`; DegeneracyError when not isolated.
    DenseState eigenstate(double energy, double tolerance = 1e-8) const;

private:
    std::size_t sites_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd vectors_;
};

DenseState exact_evolution(const DenseOperator& h, const DenseState& state, double t);

/// Von Neumann entropy (nats) of the reduced state on `block`.
double exact_entropy(const DenseState& state, const Subinterval& block);

/// Reduced density matrix on `block`.
Eigen::MatrixXcd partial_trace(const DenseState& state, const Subinterval& block);

/// Gamma_pq = <C_p C_q^*> by dense traces.
CorrelationMatrix exact_correlation_matrix(const DenseState& state);

/// Dense eigenstate psi_alpha of the chain, located through E_alpha.
DenseState dense_eigenstate(const ChainParameters& params, const OccupationPattern& alpha);
/// Tensor product of block eigenstates.
DenseState dense_eigenstate_product(const ChainParameters& params, const Partition& partition,
                                    const std::vector<OccupationPattern>& patterns);

struct WickReport {
    std::size_t order = 0;
    std::complex<double> moment;     ///< dense <F_1 ... F_m>
    std::complex<double> pfaffian;   ///< pf of the pair matrix, 0 for odd m
    double residual = 0.0;
};

/// Field operators F_i = sum_p w_ip C_p with C = (c_1, c_1^*, ...); one row of `weights` per operator.
WickReport verify_wick(const DenseState& state, const Eigen::MatrixXcd& weights);

struct ProductReport {
    double direct_sum_residual = 0.0;   ///< dense Gamma vs direct sum of block projections
    double wick_residual = 0.0;         ///< even orders up to 6
    double odd_moment = 0.0;            ///< orders 1, 3, 5
    double cross_block = 0.0;           ///< max pair expectation between different blocks
};

ProductReport verify_product_quasifree(const ChainParameters& params, const Partition& partition,
                                       const std::vector<OccupationPattern>& patterns, std::uint64_t seed);

struct EquivalenceReport {
    /// family -> max |entropy difference| over the grid
    std::map<std::string, double> entropy_error;
    std::optional<double> transport_error;
    std::size_t comparisons = 0;

    double max_entropy_error() const;
};

/// Free-fermion vs dense entropies for the four initial-state families, plus
/// transport when the chain is isotropic. Requires n <= 8.
EquivalenceReport oracle_equivalence(const ChainParameters& params, const TimeGrid& grid, std::uint64_t seed);

}  // namespace xylab
