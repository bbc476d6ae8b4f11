#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "xylab/error.hpp"
#include "xylab/spectral.hpp"

using namespace xylab;
using cd = std::complex<double>;

namespace {

ChainParameters random_chain(std::size_t n, std::uint64_t seed, bool isotropic = false) {
    DisorderSpec spec;
    spec.mu = UniformDistribution{0.5, 1.5};
    spec.gamma = isotropic ? Distribution(ConstantDistribution{0.0}) : Distribution(UniformDistribution{-0.5, 0.5});
    spec.nu = UniformDistribution{0.0, 4.0};
    spec.seed = seed;
    return sample_parameters(spec, n);
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("two by two hopping matrix") {
    const EigenSystem eig = diagonalize(build_isotropic(ChainParameters({1.0}, {0.0}, {0.0, 0.0})));
    CHECK(eig.eigenvalues()(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eig.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single site anisotropic matrix") {
    const EigenSystem eig = diagonalize(build_anisotropic(ChainParameters({}, {}, {2.0})));
    CHECK(eig.eigenvalues()(0) == doctest::Approx(-2.0));
    CHECK(eig.eigenvalues()(1) == doctest::Approx(2.0));
    CHECK(eig.lambda()(0) == doctest::Approx(2.0));
}

TEST_CASE("eigensystem invariants against a generic dense solver") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const BlockMatrix m = build_anisotropic(random_chain(6, seed));
        const EigenSystem eig = diagonalize(m);
        const Eigen::MatrixXd& v = eig.eigenvectors();
        const Eigen::Index dim = v.rows();
        CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() <= 1e-12);
        const Eigen::MatrixXd rebuilt = v * eig.eigenvalues().asDiagonal() * v.transpose();
        CHECK((rebuilt - m.entries()).cwiseAbs().maxCoeff() <= 1e-10 * m.entries().cwiseAbs().maxCoeff());

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m.entries());
        CHECK((ref.eigenvalues() - eig.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10);
        // symmetric about zero
        for (Eigen::Index i = 0; i < dim; ++i) {
            CHECK(std::abs(ref.eigenvalues()(i) + ref.eigenvalues()(dim - 1 - i)) <= 1e-10);
        }
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(eig.eigenvalues()(eig.plus_column(j)) == doctest::Approx(eig.lambda()(static_cast<Eigen::Index>(j))));
            CHECK(eig.eigenvalues()(eig.minus_column(j)) ==
                  doctest::Approx(-eig.lambda()(static_cast<Eigen::Index>(j))));
        }
        CHECK(std::is_sorted(eig.lambda().data(), eig.lambda().data() + eig.lambda().size()));
        CHECK(eig.lambda().minCoeff() >= 0.0);
    }
}

TEST_CASE("Bogoliubov matrix block-diagonalizes M") {
    const BlockMatrix m = build_anisotropic(random_chain(5, 8));
    const EigenSystem eig = diagonalize(m);
    const Eigen::MatrixXd w = eig.bogoliubov();
    const Eigen::MatrixXd d = w * m.entries() * w.transpose();
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(10, 10);
    for (Eigen::Index j = 0; j < 5; ++j) {
        expected(2 * j, 2 * j) = eig.lambda()(j);
        expected(2 * j + 1, 2 * j + 1) = -eig.lambda()(j);
    }
    CHECK((d - expected).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((w * w.transpose() - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("zero anisotropy: spectrum of M is plus and minus that of A") {
    const ChainParameters p = random_chain(7, 3, true);
    const EigenSystem a = diagonalize(build_isotropic(p));
    const EigenSystem m = diagonalize(build_anisotropic(p));
    std::vector<double> expected;
    for (Eigen::Index i = 0; i < a.eigenvalues().size(); ++i) {
        expected.push_back(a.eigenvalues()(i));
        expected.push_back(-a.eigenvalues()(i));
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(std::abs(expected[i] - m.eigenvalues()(static_cast<Eigen::Index>(i))) <= 1e-10);
    }
}

TEST_CASE("spectral projection examples") {
    const EigenSystem one = diagonalize(build_anisotropic(ChainParameters({}, {}, {2.0})));
    const CorrelationMatrix p = spectral_projection(one, OccupationPattern::parse("0"));
    Eigen::Matrix2cd expected;
    expected << 0, 0, 0, 1;
    CHECK(max_abs(p.entries() - expected) <= 1e-15);

    const EigenSystem eig = diagonalize(build_anisotropic(random_chain(4, 11)));
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const OccupationPattern alpha = OccupationPattern::random(4, rng);
        const CorrelationMatrix pa = spectral_projection(eig, alpha);
        const CorrelationMatrix pb = spectral_projection(eig, alpha.complement());
        CHECK(max_abs(pa.entries() + pb.entries() - Eigen::MatrixXcd::Identity(8, 8)) <= 1e-12);
        CHECK(max_abs(pa.entries() * pa.entries() - pa.entries()) <= 1e-12);
        CHECK(pa.entries() == pa.entries().transpose());
        CHECK(pa.entries().imag().cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(pa.entries().trace().real() - 4.0) <= 1e-12);
    }
    // all-zero pattern selects the positive spectral subspace
    const CorrelationMatrix positive = spectral_projection(eig, OccupationPattern::zeros(4));
    const Eigen::MatrixXcd indicator = matrix_function(eig, [](double x) { return cd(x > 0 ? 1.0 : 0.0); });
    CHECK(max_abs(positive.entries() - indicator) <= 1e-12);
}

TEST_CASE("spectral projection rejects degenerate spectra") {
    const EigenSystem eig = diagonalize(build_anisotropic(ChainParameters::constant(3, 0.0, 0.0, 1.0)));
    CHECK_FALSE(eig.is_simple());
    CHECK_THROWS_AS(eig.require_simple(), DegeneracyError);
    CHECK_THROWS_AS(spectral_projection(eig, OccupationPattern::zeros(3)), DegeneracyError);
}

TEST_CASE("matrix functions") {
    const BlockMatrix m = build_anisotropic(random_chain(5, 21));
    const EigenSystem eig = diagonalize(m);
    const Eigen::MatrixXcd id = matrix_function(eig, [](double x) { return cd(x); });
    CHECK(max_abs(id - m.entries().cast<cd>()) <= 1e-10);

    const OccupationPattern alpha = OccupationPattern::parse("10110");
    // indicator of the set {lambda_j : alpha_j = 0} U {-lambda_j : alpha_j = 1}
    const Eigen::VectorXd lam = eig.lambda();
    auto in_set = [&](double x) {
        for (Eigen::Index j = 0; j < lam.size(); ++j) {
            const double target = alpha[static_cast<std::size_t>(j)] ? -lam(j) : lam(j);
            if (std::abs(x - target) <= 1e-9) {
                return cd(1.0);
            }
        }
        return cd(0.0);
    };
    CHECK(max_abs(matrix_function(eig, in_set) - spectral_projection(eig, alpha).entries()) <= 1e-12);

    const EigenSystem two = diagonalize(build_isotropic(ChainParameters({1.0}, {0.0}, {0.0, 0.0})));
    for (double t : {0.0, 0.37, 2.9}) {
        const Eigen::MatrixXcd u = matrix_function(two, [t](double x) { return std::exp(cd(0.0, -2.0 * t * x)); });
        Eigen::Matrix2cd expected;
        expected << std::cos(2 * t), cd(0, -std::sin(2 * t)), cd(0, -std::sin(2 * t)), std::cos(2 * t);
        CHECK(max_abs(u - expected) <= 1e-14);
    }
}

TEST_CASE("eigencorrelator examples") {
    const Eigen::MatrixXd single = eigencorrelator(diagonalize(build_anisotropic(ChainParameters({}, {}, {2.0}))));
    CHECK(single(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

    const Eigen::MatrixXd decoupled =
        eigencorrelator(diagonalize(build_anisotropic(ChainParameters({0.0, 0.0, 0.0}, {0.2, 0.1, 0.0}, {1.0, 2.0, 3.0, 4.0}))));
    for (Eigen::Index j = 0; j < 4; ++j) {
        for (Eigen::Index k = 0; k < 4; ++k) {
            if (j != k) {
                CHECK(decoupled(j, k) == 0.0);
            }
        }
    }

    const Eigen::MatrixXd pair = eigencorrelator(diagonalize(build_isotropic(ChainParameters({1.0}, {0.0}, {0.0, 0.0}))));
    CHECK(pair(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigencorrelator dominates every bounded function") {
    const EigenSystem eig = diagonalize(build_anisotropic(random_chain(6, 31)));
    const Eigen::MatrixXd q = eigencorrelator(eig);
    Rng rng = make_rng(77);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<cd> values;
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
            values.push_back(std::polar(1.0, phase(rng)));
        }
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(12, 12);
        for (Eigen::Index i = 0; i < 12; ++i) {
            const Eigen::VectorXd v = eig.eigenvectors().col(i);
            g += values[static_cast<std::size_t>(i)] * (v * v.transpose()).cast<cd>();
        }
        for (Eigen::Index j = 0; j < 6; ++j) {
            for (Eigen::Index k = 0; k < 6; ++k) {
                const Eigen::Matrix2cd block = g.block(2 * j, 2 * k, 2, 2);
                // independent spectral norm: sqrt of the largest eigenvalue of B^* B
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block.adjoint() * block);
                const double norm = std::sqrt(std::max(0.0, es.eigenvalues()(1)));
                CHECK(norm <= q(j, k) + 1e-12);
                CHECK(std::abs(spectral_norm_2x2(block) - norm) <= 1e-12);
            }
        }
    }
}

TEST_CASE("correlator profile takes the maximum over pairs at each distance") {
    Eigen::MatrixXd mean(5, 5);
    for (Eigen::Index j = 0; j < 5; ++j) {
        for (Eigen::Index k = 0; k < 5; ++k) {
            mean(j, k) = std::exp(-static_cast<double>(std::abs(j - k))) * (1.0 + 0.01 * static_cast<double>(j));
        }
    }
    const CorrelatorProfile p = CorrelatorProfile::from_mean_matrix(mean, 3);
    REQUIRE(p.size() == 5);
    CHECK(p.samples == 3);
    CHECK(p.q_max[0] == doctest::Approx(1.04));
    CHECK(p.q_max[4] == doctest::Approx(std::exp(-4.0) * 1.04));
    CHECK(p.q_mean[0] == doctest::Approx(1.02));
    for (std::size_t r = 1; r < 5; ++r) {
        CHECK(p.q_max[r] < p.q_max[r - 1]);
    }
    CHECK(p.at(9) == 0.0);
}

TEST_CASE("decay fits recover generating models") {
    CorrelatorProfile expo;
    CorrelatorProfile power;
    for (int r = 0; r < 30; ++r) {
        expo.q_max.push_back(3.0 * std::exp(-r / 2.0));
        power.q_max.push_back(1.0 / std::pow(1.0 + r, 3.0));
    }
    expo.q_mean = expo.q_max;
    power.q_mean = power.q_max;
    const DecayFit fe = fit_decay(expo, DecayModel::exponential, 1, 20);
    CHECK(fe.parameter == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fe.amplitude == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fe.residual < 1e-12);
    CHECK(fe.points == 20);
    const DecayFit fp = fit_decay(power, DecayModel::power, 1, 20);
    CHECK(fp.parameter == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fp.residual < 1e-12);
    // the wrong model fits worse
    CHECK(fit_decay(expo, DecayModel::power, 1, 20).residual > fe.residual);
}

TEST_CASE("decay fit errors") {
    CorrelatorProfile tiny;
    tiny.q_max = std::vector<double>(10, 1e-20);
    tiny.q_max[0] = 1.0;
    tiny.q_mean = tiny.q_max;
    CHECK_THROWS_AS(fit_decay(tiny, DecayModel::exponential, 1, 9), UnderflowError);
    CorrelatorProfile short_profile;
    short_profile.q_max = {1.0, 0.5, 0.25};
    short_profile.q_mean = short_profile.q_max;
    CHECK_THROWS_AS(fit_decay(short_profile, DecayModel::exponential, 1, 2), NumericError);
}

TEST_CASE("many-body spectrum") {
    const EigenSystem eig = diagonalize(build_anisotropic(random_chain(4, 5)));
    const std::vector<double> spectrum = eig.many_body_spectrum();
    REQUIRE(spectrum.size() == 16);
    CHECK(spectrum.front() == doctest::Approx(-eig.e1()));
    CHECK(spectrum.back() == doctest::Approx(eig.e1()));
    const OccupationPattern alpha = OccupationPattern::parse("1010");
    const double expected = 2.0 * (eig.lambda()(0) + eig.lambda()(2)) - eig.lambda().sum();
    CHECK(eig.many_body_energy(alpha) == doctest::Approx(expected));
}
