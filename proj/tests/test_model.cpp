#include <doctest.h>

#include <cmath>
#include <numeric>

#include "xylab/error.hpp"
#include "xylab/model.hpp"

using namespace xylab;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

ChainParameters random_chain(std::size_t n, std::uint64_t seed) {
    DisorderSpec spec;
    spec.mu = UniformDistribution{0.5, 1.5};
    spec.gamma = UniformDistribution{-0.5, 0.5};
    spec.nu = UniformDistribution{0.0, 4.0};
    spec.seed = seed;
    return sample_parameters(spec, n);
}

}  // namespace

TEST_CASE("constant distributions give constant sequences") {
    DisorderSpec spec;
    spec.mu = ConstantDistribution{1.0};
    spec.gamma = ConstantDistribution{0.0};
    spec.nu = ConstantDistribution{0.5};
    const ChainParameters p = sample_parameters(spec, 3);
    CHECK(p.mu() == std::vector<double>{1.0, 1.0});
    CHECK(p.gamma() == std::vector<double>{0.0, 0.0});
    CHECK(p.nu() == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("sampling is deterministic in the seed") {
    DisorderSpec spec;
    spec.nu = UniformDistribution{0.0, 4.0};
    spec.seed = 99;
    CHECK(sample_parameters(spec, 10) == sample_parameters(spec, 10));
    DisorderSpec other = spec;
    other.seed = 100;
    CHECK_FALSE(sample_parameters(spec, 10) == sample_parameters(other, 10));
    const ChainParameters drawn = sample_parameters(spec, 10);
    for (double v : drawn.nu()) {
        CHECK(v >= 0.0);
        CHECK(v <= 4.0);
    }
}

TEST_CASE("changing one distribution leaves the other streams untouched") {
    DisorderSpec a;
    a.mu = UniformDistribution{0.5, 1.5};
    a.nu = UniformDistribution{0.0, 4.0};
    a.seed = 5;
    DisorderSpec b = a;
    b.gamma = UniformDistribution{-1.0, 1.0};
    CHECK(sample_parameters(a, 20).mu() == sample_parameters(b, 20).mu());
    CHECK(sample_parameters(a, 20).nu() == sample_parameters(b, 20).nu());
}

TEST_CASE("two-point field has sample mean near zero") {
    DisorderSpec spec;
    spec.nu = TwoPointDistribution{1.0, -1.0, 0.5};
    spec.seed = 2024;
    const auto nu = sample_parameters(spec, 100000).nu();
    const double mean = std::accumulate(nu.begin(), nu.end(), 0.0) / static_cast<double>(nu.size());
    CHECK(std::abs(mean) < 0.02);
    for (double v : nu) {
        CHECK((v == 1.0 || v == -1.0));
    }
}

TEST_CASE("invalid distributions are configuration errors") {
    CHECK_THROWS_AS(validate(UniformDistribution{2.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate(TwoPointDistribution{1.0, -1.0, 1.5}), ConfigError);
    CHECK_THROWS_AS(validate(TwoPointDistribution{1.0, -1.0, -0.1}), ConfigError);
    CHECK_NOTHROW(validate(UniformDistribution{1.0, 1.0}));
    DisorderSpec spec;
    spec.nu = UniformDistribution{3.0, 0.0};
    CHECK_THROWS_AS(sample_parameters(spec, 4), ConfigError);
}

TEST_CASE("chain parameters enforce lengths and finiteness") {
    CHECK_THROWS_AS(ChainParameters({1.0}, {0.0, 0.0}, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(ChainParameters({1.0}, {0.0}, {0.0, NAN}), ConfigError);
    CHECK_NOTHROW(ChainParameters({}, {}, {1.0}));
}

TEST_CASE("isotropic matrix examples") {
    CHECK(build_isotropic(ChainParameters({1.0}, {0.0}, {0.0, 0.0})).entries() == mat({{0, 1}, {1, 0}}));
    CHECK(build_isotropic(ChainParameters({}, {}, {2.0})).entries() == mat({{-2}}));
    const ChainParameters p({1.0, 2.0}, {0.0, 0.0}, {3.0, 4.0, 5.0});
    CHECK(build_isotropic(p).entries() == mat({{-3, 1, 0}, {1, -4, 2}, {0, 2, -5}}));
}

TEST_CASE("anisotropic matrix examples") {
    CHECK(build_anisotropic(ChainParameters({}, {}, {2.0})).entries() == mat({{-2, 0}, {0, 2}}));

    const BlockMatrix m = build_anisotropic(ChainParameters({1.0}, {0.0}, {0.0, 0.0}));
    CHECK(m.entries().block(0, 2, 2, 2) == mat({{1, 0}, {0, -1}}));
    // particle rows/cols carry A, hole rows/cols carry -A
    const Eigen::MatrixXd a = mat({{0, 1}, {1, 0}});
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            CHECK(m.entries()(2 * j, 2 * k) == a(j, k));
            CHECK(m.entries()(2 * j + 1, 2 * k + 1) == -a(j, k));
            CHECK(m.entries()(2 * j, 2 * k + 1) == 0.0);
        }
    }

    const BlockMatrix g = build_anisotropic(ChainParameters({1.0}, {0.3}, {0.0, 0.0}));
    CHECK(g.entries().block(0, 2, 2, 2) == mat({{1, 0.3}, {-0.3, -1}}));
    CHECK(anisotropy_block(0.3) == Eigen::Matrix2d(mat({{1, 0.3}, {-0.3, -1}})));
}

TEST_CASE("anisotropic matrix is exactly symmetric and particle-hole odd") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (std::size_t n : {1u, 2u, 7u}) {
            const BlockMatrix m = build_anisotropic(random_chain(n, seed));
            CHECK(m.entries() == m.entries().transpose());
            const Eigen::MatrixXd j = particle_hole_swap(n);
            CHECK((j * m.entries() * j) == -m.entries());
        }
    }
}

TEST_CASE("restriction examples") {
    const ChainParameters p({1.0, 2.0}, {0.0, 0.0}, {3.0, 4.0, 5.0});
    const BlockMatrix a = build_isotropic(p);
    CHECK(restrict(a, Subinterval(1, 3)).entries() == a.entries());
    CHECK(restrict(a, Subinterval(2, 3)).entries() == mat({{-4, 2}, {2, -5}}));

    const ChainParameters q({1.0}, {0.4}, {1.5, -2.0});
    CHECK(restrict(build_anisotropic(q), Subinterval(1, 1)).entries() == mat({{-1.5, 0}, {0, 1.5}}));
    CHECK_THROWS_AS(restrict(a, Subinterval(2, 4)), IndexError);
}

TEST_CASE("restriction commutes with construction") {
    const ChainParameters p = random_chain(9, 17);
    for (const Subinterval& b : {Subinterval(1, 9), Subinterval(3, 6), Subinterval(9, 9), Subinterval(1, 4)}) {
        const ChainParameters local = p.restricted(b);
        CHECK(local.sites() == b.size());
        CHECK(restrict(build_anisotropic(p), b).entries() == build_anisotropic(local).entries());
        CHECK(restrict(build_isotropic(p), b).entries() == build_isotropic(local).entries());
    }
}

TEST_CASE("partition geometry") {
    const Partition cuts = Partition::from_cut_points({1, 3, 5}, 5);
    REQUIRE(cuts.block_count() == 2);
    CHECK(cuts.block(0) == Subinterval(1, 2));
    CHECK(cuts.block(1) == Subinterval(3, 5));

    const Partition single = Partition::singletons(4);
    CHECK(single.block_count() == 4);
    CHECK(single.block(3) == Subinterval(4, 4));
    CHECK(Partition::whole(6).block(0) == Subinterval(1, 6));
    CHECK(Partition::halves(7).block(1) == Subinterval(4, 7));

    for (const Partition& p : {cuts, single, Partition::from_block_starts({1, 2, 6}, 8)}) {
        std::size_t next = 1;
        for (const Subinterval& b : p.blocks()) {
            CHECK(b.a() == next);
            next = b.b() + 1;
        }
        CHECK(next == p.sites() + 1);
    }
    CHECK_THROWS(Partition::from_block_starts({2, 4}, 6));
    CHECK_THROWS(Partition::from_block_starts({1, 4, 4}, 6));
    CHECK_THROWS(Partition::from_block_starts({1, 7}, 6));
}

TEST_CASE("site sets and distances") {
    const SiteSet s(std::vector<std::size_t>{7, 2, 4});
    CHECK(s.sites() == std::vector<std::size_t>{2, 4, 7});
    CHECK(s.complement(8).sites() == std::vector<std::size_t>{1, 3, 5, 6, 8});
    CHECK(distance(SiteSet(Subinterval(21, 30)), SiteSet(std::vector<std::size_t>{16, 35})) == 5);
    CHECK(distance(s, SiteSet(Subinterval(4, 5))) == 0);
    CHECK(SiteSet(Subinterval(2, 3)).is_subset_of(SiteSet(Subinterval(1, 5))));
    CHECK_THROWS_AS(s.check_within(6), IndexError);
    CHECK_THROWS(Subinterval(3, 2));
    CHECK_THROWS(Subinterval(0, 2));
}
