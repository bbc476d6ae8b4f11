#include "xylab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "xylab/dynamics.hpp"
#include "xylab/entanglement.hpp"
#include "xylab/error.hpp"
#include "xylab/oracle.hpp"
#include "xylab/pfaffian.hpp"
#include "xylab/spectral.hpp"

namespace xylab {

namespace {

using cd = std::complex<double>;

ChainParameters random_chain(std::size_t n, std::uint64_t seed, bool isotropic) {
    DisorderSpec spec;
    spec.mu = UniformDistribution{0.5, 1.5};
    spec.gamma = isotropic ? Distribution(ConstantDistribution{0.0}) : Distribution(UniformDistribution{-0.5, 0.5});
    spec.nu = UniformDistribution{0.0, 4.0};
    spec.seed = seed;
    return sample_parameters(spec, n);
}

Eigen::MatrixXcd random_weights(std::size_t count, std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd w(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(2 * n));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index p = 0; p < w.cols(); ++p) {
            const double re = normal(rng);
            w(i, p) = cd(re, normal(rng));
        }
    }
    return w;
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<CheckResult> run_verification_suite(const VerificationOptions& options) {
    std::vector<CheckResult> out;
    auto record = [&](const std::string& name, double residual, double tolerance) {
        out.push_back({name, residual, tolerance, residual <= tolerance});
    };
    auto eigen_of = [&](const ChainParameters& p) { return diagonalize(options.anisotropic_builder(p)); };

    const ChainParameters chain6 = random_chain(6, derive_seed(options.seed, "chain6"), false);
    const ChainParameters iso6 = random_chain(6, derive_seed(options.seed, "iso6"), true);
    Rng rng = make_rng(derive_seed(options.seed, "suite"));

    {
        const auto c = build_jordan_wigner(5);
        record("car_relations", car_defect(c), 1e-12);
        double defect = 0.0;
        for (std::size_t j = 1; j <= 5; ++j) {
            const DenseOperator a = lowering(5, j);
            defect = std::max(defect, max_abs(c[j - 1].adjoint() * c[j - 1] - a.adjoint() * a));
        }
        record("jordan_wigner_number_operators", defect, 1e-12);
    }

    {
        double aniso = 0.0;
        for (std::size_t n : {1, 4, 7, 10}) {
            const ChainParameters p = random_chain(n, derive_seed(options.seed, n), false);
            aniso = std::max(aniso, verify_quadratic_form(p, options.anisotropic_builder(p)).anisotropic_residual);
        }
        record("quadratic_form_anisotropic", aniso, 1e-10);
        const QuadraticFormReport iso = verify_quadratic_form(iso6, options.anisotropic_builder(iso6));
        record("quadratic_form_isotropic", std::max(iso.anisotropic_residual, iso.isotropic_residual.value_or(1.0)),
               1e-10);
    }

    {
        const DenseOperator h = build_hamiltonian(iso6);
        const DenseOperator number = number_operator(6, SiteSet(Subinterval(1, 6)));
        record("number_conservation_isotropic", max_abs(h * number - number * h), 1e-12);
    }

    {
        const std::vector<double> ff = eigen_of(chain6).many_body_spectrum();
        const DenseSpectrum dense(build_hamiltonian(chain6));
        double d = 0.0;
        for (std::size_t i = 0; i < ff.size(); ++i) {
            d = std::max(d, std::abs(ff[i] - dense.energies()(static_cast<Eigen::Index>(i))));
        }
        record("free_fermion_spectrum", d, 1e-9);
    }

    {
        const BlockMatrix m = options.anisotropic_builder(chain6);
        const Eigen::MatrixXd j = particle_hole_swap(6);
        record("particle_hole_symmetry", (j * m.entries() * j + m.entries()).cwiseAbs().maxCoeff(), 1e-14);
    }

    const EigenSystem eig6 = eigen_of(chain6);
    const OccupationPattern alpha = OccupationPattern::random(6, rng);
    {
        const CorrelationMatrix p = spectral_projection(eig6, alpha);
        record("projection_idempotence", p.idempotence_defect(), 1e-12);
        const CorrelationMatrix dense = exact_correlation_matrix(dense_eigenstate(chain6, alpha));
        record("eigenstate_correlation_is_spectral_projection",
               (dense.entries() - p.entries()).cwiseAbs().maxCoeff(), 1e-10);
    }

    {
        double d = 0.0;
        for (double t : {0.3, 1.7, 6.0}) {
            d = std::max(d, propagator(eig6, t).unitarity_defect());
        }
        record("propagator_unitarity", d, 1e-12);
    }

    {
        const OccupationPattern spins = OccupationPattern::random(6, rng);
        const DenseState state = DenseState::basis(spins);
        const CorrelationMatrix gamma0 = exact_correlation_matrix(state);
        const DenseSpectrum dense(build_hamiltonian(chain6));
        double d = 0.0;
        for (double t : {0.4, 2.5}) {
            const CorrelationMatrix evolved = evolve_correlation(gamma0, propagator(eig6, t));
            const CorrelationMatrix exact = exact_correlation_matrix(dense.evolve(state, t));
            d = std::max(d, (evolved.entries() - exact.entries()).cwiseAbs().maxCoeff());
        }
        record("conjugation_law", d, 1e-10);
    }

    {
        const Partition split = Partition::from_block_starts({1, 4}, 6);
        const auto patterns = split_pattern(OccupationPattern::random(6, rng), split);
        const ProductReport report = verify_product_quasifree(chain6, split, patterns, options.seed);
        record("direct_sum_structure", report.direct_sum_residual, 1e-10);
        record("cross_block_vanishing", report.cross_block, 1e-12);
        record("wick_product_state", report.wick_residual, 1e-9);
        record("odd_moments_product_state", report.odd_moment, 1e-12);
    }

    {
        const DenseState psi = dense_eigenstate(chain6, alpha);
        double even = 0.0;
        double odd = 0.0;
        for (std::size_t m : {3, 4, 5, 6}) {
            const WickReport w = verify_wick(psi, random_weights(m, 6, rng) / std::sqrt(24.0));
            if (m % 2 == 0) {
                even = std::max(even, w.residual);
            } else {
                odd = std::max(odd, std::abs(w.moment));
            }
        }
        record("wick_eigenstate", even, 1e-9);
        record("odd_moments_eigenstate", odd, 1e-12);
    }

    {
        std::normal_distribution<double> normal(0.0, 1.0);
        double worst = 0.0;
        for (Eigen::Index m : {2, 4, 8, 12}) {
            Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = i + 1; j < m; ++j) {
                    const double re = normal(rng);
                    x(i, j) = cd(re, normal(rng));
                    x(j, i) = -x(i, j);
                }
            }
            const cd pf = pfaffian(x);
            const cd det = x.determinant();
            worst = std::max(worst, std::abs(pf * pf - det) / std::max(1.0, std::abs(det)));
        }
        record("pfaffian_squares_to_determinant", worst, 1e-10);
    }

    {
        const TimeGrid grid = TimeGrid::linear(6, 12.0);
        const EquivalenceReport aniso = oracle_equivalence(chain6, grid, options.seed);
        const EquivalenceReport iso = oracle_equivalence(iso6, grid, options.seed);
        record("entropy_oracle_equivalence", std::max(aniso.max_entropy_error(), iso.max_entropy_error()), 1e-8);
        record("transport_oracle_equivalence", iso.transport_error.value_or(1.0), 1e-8);
    }
    return out;
}

}  // namespace xylab
