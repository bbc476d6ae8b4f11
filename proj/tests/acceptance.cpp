// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "xylab/ensemble.hpp"
#include "xylab/error.hpp"
#include "xylab/oracle.hpp"
#include "xylab/seeding.hpp"
#include "xylab/serialize.hpp"

using namespace xylab;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.passed = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s  %s  (%.1fs)\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
}

ChainParameters random_chain(std::size_t n, std::uint64_t seed, bool isotropic) {
    DisorderSpec spec;
    spec.mu = UniformDistribution{0.5, 1.5};
    spec.gamma = isotropic ? Distribution(ConstantDistribution{0.0}) : Distribution(UniformDistribution{-0.5, 0.5});
    spec.nu = UniformDistribution{0.0, 4.0};
    spec.seed = seed;
    return sample_parameters(spec, n);
}

Eigen::MatrixXcd random_weights(std::size_t m, std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd w(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(2 * n));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index p = 0; p < w.cols(); ++p) {
            const double re = normal(rng);
            w(i, p) = std::complex<double>(re, normal(rng)) / std::sqrt(static_cast<double>(4 * n));
        }
    }
    return w;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

const Verdict* find(const EnsembleResult& r, const std::string& name) {
    for (const Verdict& v : r.verdicts) {
        if (v.name == name) {
            return &v;
        }
    }
    return nullptr;
}

EnsembleConfig transport_config() {
    EnsembleConfig cfg;
    cfg.kind = ExperimentKind::transport;
    cfg.sizes = {50};
    cfg.realizations = 200;
    cfg.disorder.mu = ConstantDistribution{1.0};
    cfg.disorder.gamma = ConstantDistribution{0.0};
    cfg.disorder.nu = UniformDistribution{0.0, 4.0};
    cfg.disorder.seed = kSeed;
    cfg.grid.kind = TimeGridSpec::Kind::geometric;
    cfg.grid.count = 200;
    cfg.grid.t_min = 0.05;
    cfg.grid.t_max = 500.0;
    cfg.grid.include_zero = true;
    cfg.transport.wall = Subinterval(21, 30);
    cfg.transport.distances = {5, 10, 15};
    cfg.threads = default_threads();
    return cfg;
}

EnsembleConfig sweep_config(PartitionKind partition) {
    EnsembleConfig cfg;
    cfg.kind = ExperimentKind::entanglement;
    cfg.sizes = {20, 40, 80};
    cfg.realizations = 100;
    cfg.disorder.mu = ConstantDistribution{1.0};
    cfg.disorder.gamma = ConstantDistribution{0.0};
    cfg.disorder.nu = UniformDistribution{0.0, 4.0};
    cfg.disorder.seed = kSeed;
    cfg.grid.kind = TimeGridSpec::Kind::geometric;
    cfg.grid.count = 200;
    cfg.grid.t_min = 0.05;
    cfg.grid.t_max = 500.0;
    cfg.entanglement.partition = partition;
    cfg.entanglement.random_patterns = 16;
    cfg.entanglement.clean_control = CleanControl{1.0, 1.0};
    cfg.keep_series = false;
    cfg.threads = default_threads();
    return cfg;
}

EnsembleConfig eigencorrelator_config() {
    EnsembleConfig cfg;
    cfg.kind = ExperimentKind::eigencorrelator;
    cfg.sizes = {100};
    cfg.realizations = 500;
    cfg.disorder.mu = ConstantDistribution{1.0};
    cfg.disorder.gamma = ConstantDistribution{0.0};
    cfg.disorder.nu = UniformDistribution{0.0, 4.0};
    cfg.disorder.seed = kSeed;
    cfg.eigencorrelator.flavor = Flavor::isotropic;
    cfg.threads = default_threads();
    return cfg;
}

/// Everything the CLI would write for a result.
std::string serialized(const EnsembleResult& r) {
    std::string s = summary_json(r).dump(2) + records_csv(r);
    if (r.correlator) {
        s += correlator_csv(*r.correlator);
    }
    switch (r.config.kind) {
        case ExperimentKind::transport: s += transport_series_csv(r) + density_profile_csv(r); break;
        case ExperimentKind::entanglement:
            for (std::size_t n : r.config.sizes) {
                s += entropy_csv(r, n);
            }
            s += size_sweep_csv(r);
            break;
        default: break;
    }
    return s;
}

}  // namespace

int main() {
    criterion("1_oracle_equivalence", [] {
        EnsembleConfig cfg;
        cfg.kind = ExperimentKind::oracle_verify;
        cfg.sizes = {4, 6, 8};
        cfg.realizations = 20;
        cfg.disorder.mu = UniformDistribution{0.5, 1.5};
        cfg.disorder.gamma = UniformDistribution{-0.5, 0.5};
        cfg.disorder.nu = UniformDistribution{0.0, 4.0};
        cfg.disorder.seed = kSeed;
        cfg.grid.kind = TimeGridSpec::Kind::linear;
        cfg.grid.count = 10;
        cfg.grid.t_max = 20.0;
        cfg.oracle.tolerance = 1e-8;
        cfg.threads = default_threads();
        const EnsembleResult r = run_ensemble(cfg);
        double entropy = 0.0;
        double transport = 0.0;
        std::size_t used = 0;
        for (const auto& rec : r.records) {
            if (rec.rejected) {
                continue;
            }
            ++used;
            entropy = std::max(entropy, rec.values.at("entropy_error"));
            transport = std::max(transport, rec.values.at("transport_error"));
        }
        Outcome o;
        o.passed = used == 60 && entropy <= 1e-8 && transport <= 1e-8;
        o.detail = std::to_string(used) + " instances, max entropy error " + fmt("%.2e", entropy) +
                   ", max transport error " + fmt("%.2e", transport) + " (tol 1e-8)";
        return o;
    });

    criterion("2_structural_identities", [] {
        double form = 0.0;
        for (std::size_t n = 1; n <= 10; ++n) {
            form = std::max(form, verify_quadratic_form(random_chain(n, derive_seed(kSeed, n), false)).anisotropic_residual);
        }
        double spectrum = 0.0;
        for (std::size_t n : {4u, 6u, 8u}) {
            const ChainParameters p = random_chain(n, derive_seed(kSeed, 100 + n), false);
            const std::vector<double> ff = diagonalize(build_anisotropic(p)).many_body_spectrum();
            const DenseSpectrum dense(build_hamiltonian(p));
            for (std::size_t i = 0; i < ff.size(); ++i) {
                spectrum = std::max(spectrum, std::abs(ff[i] - dense.energies()(static_cast<Eigen::Index>(i))));
            }
        }
        double car = 0.0;
        for (std::size_t n : {2u, 5u, 8u}) {
            car = std::max(car, car_defect(build_jordan_wigner(n)));
        }
        Outcome o;
        o.passed = form <= 1e-10 && spectrum <= 1e-9 && car <= 1e-12;
        o.detail = "quadratic form " + fmt("%.2e", form) + " (tol 1e-10), spectrum " + fmt("%.2e", spectrum) +
                   " (tol 1e-9), CAR " + fmt("%.2e", car) + " (tol 1e-12)";
        return o;
    });

    criterion("3_wick_pfaffian", [] {
        Rng rng = make_rng(derive_seed(kSeed, "wick"));
        double even = 0.0;
        double odd = 0.0;
        for (std::uint64_t s = 0; s < 4; ++s) {
            const ChainParameters p = random_chain(6, derive_seed(kSeed, 200 + s), false);
            const DenseState psi = dense_eigenstate(p, OccupationPattern::random(6, rng));
            for (std::size_t m : {3u, 4u, 5u, 6u}) {
                const WickReport w = verify_wick(psi, random_weights(m, 6, rng));
                if (m % 2 == 0) {
                    even = std::max(even, w.residual);
                } else {
                    odd = std::max(odd, std::abs(w.moment));
                }
            }
            const Partition split = Partition::from_block_starts({1, 4}, 6);
            const ProductReport pr =
                verify_product_quasifree(p, split, split_pattern(OccupationPattern::random(6, rng), split), s);
            even = std::max(even, pr.wick_residual);
            odd = std::max(odd, pr.odd_moment);
        }
        Outcome o;
        o.passed = even <= 1e-9 && odd <= 1e-12;
        o.detail = "even moments " + fmt("%.2e", even) + " (tol 1e-9), odd moments " + fmt("%.2e", odd) +
                   " (tol 1e-12)";
        return o;
    });

    criterion("4_correlation_structure", [] {
        Rng rng = make_rng(derive_seed(kSeed, "lemmas"));
        double conjugation = 0.0;
        double projection = 0.0;
        double direct = 0.0;
        double cross = 0.0;
        for (std::uint64_t s = 0; s < 4; ++s) {
            const ChainParameters p = random_chain(6, derive_seed(kSeed, 300 + s), false);
            const EigenSystem eig = diagonalize(build_anisotropic(p));
            const DenseSpectrum dense(build_hamiltonian(p));
            const DenseState start = DenseState::basis(OccupationPattern::random(6, rng));
            const CorrelationMatrix g0 = exact_correlation_matrix(start);
            for (double t : {0.5, 3.0, 17.0}) {
                const CorrelationMatrix ff = evolve_correlation(g0, propagator(eig, t));
                const CorrelationMatrix ex = exact_correlation_matrix(dense.evolve(start, t));
                conjugation = std::max(conjugation, (ff.entries() - ex.entries()).cwiseAbs().maxCoeff());
            }
            const OccupationPattern alpha = OccupationPattern::random(6, rng);
            projection = std::max(projection, (exact_correlation_matrix(dense_eigenstate(p, alpha)).entries() -
                                               spectral_projection(eig, alpha).entries())
                                                  .cwiseAbs()
                                                  .maxCoeff());
            const Partition split = Partition::from_block_starts({1, 3, 5}, 6);
            const ProductReport pr =
                verify_product_quasifree(p, split, split_pattern(OccupationPattern::random(6, rng), split), s);
            direct = std::max(direct, pr.direct_sum_residual);
            cross = std::max(cross, pr.cross_block);
        }
        Outcome o;
        o.passed = conjugation <= 1e-10 && projection <= 1e-10 && direct <= 1e-10 && cross <= 1e-12;
        o.detail = "conjugation " + fmt("%.2e", conjugation) + ", projection " + fmt("%.2e", projection) +
                   ", direct sum " + fmt("%.2e", direct) + " (tol 1e-10), cross terms " + fmt("%.2e", cross) +
                   " (tol 1e-12)";
        return o;
    });

    std::string transport_bytes;
    criterion("5_transport_bound", [&] {
        const EnsembleResult r = run_ensemble(transport_config());
        transport_bytes = serialized(r);
        bool ok = r.rejected == 0;
        std::ostringstream os;
        const Verdict* dom = find(r, "estimator_domination");
        ok = ok && dom != nullptr && dom->passed;
        os << "domination violations " << (dom ? dom->lhs : -1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t d : {5u, 10u, 15u}) {
            const std::string key = "_d" + std::to_string(d);
            const Verdict* b = find(r, "particle_bound" + key);
            const double mean = r.aggregates.at("sup_N" + key).mean;
            ok = ok && b != nullptr && b->passed && mean < prev;
            prev = mean;
            os << "; d=" << d << " mean " << fmt("%.4f", mean) << " <= " << fmt("%.4f", b ? b->rhs : NAN);
        }
        return Outcome{ok, os.str()};
    });

    criterion("6_area_law_sweep", [] {
        const EnsembleResult r = run_ensemble(sweep_config(PartitionKind::halves));
        const Verdict flat = check_area_law(r);
        const Verdict* clean = find(r, "clean_control_exceeds_disorder");
        const bool ok = flat.passed && clean != nullptr && clean->passed;
        std::ostringstream os;
        os << "flatness E[max S] n=80 " << fmt("%.4f", flat.lhs) << " vs limit " << fmt("%.4f", flat.rhs)
           << (flat.passed ? " ok" : " VIOLATED");
        for (std::size_t n : {20u, 40u, 80u}) {
            const Aggregate& a = r.aggregates.at("max_entropy[n=" + std::to_string(n) + "]");
            os << "; n=" << n << " mean " << fmt("%.4f", a.mean) << " se " << fmt("%.4f", a.standard_error);
        }
        if (clean != nullptr) {
            os << "; clean control " << fmt("%.3f", clean->rhs) << " vs disordered max " << fmt("%.3f", clean->lhs);
        }
        return Outcome{ok, os.str()};
    });

    criterion("7_corollary_regimes", [] {
        EnsembleConfig whole = sweep_config(PartitionKind::whole);
        whole.sizes = {20, 40};
        whole.realizations = 20;
        whole.entanglement.clean_control.reset();
        const EnsembleResult w = run_ensemble(whole);
        double stationarity = 0.0;
        for (const auto& rec : w.records) {
            if (!rec.rejected) {
                stationarity = std::max(stationarity, rec.values.at("stationarity_defect"));
            }
        }
        EnsembleConfig single = sweep_config(PartitionKind::singletons);
        single.entanglement.clean_control.reset();
        const EnsembleResult s = run_ensemble(single);
        const Verdict flat = check_area_law(s);
        std::ostringstream os;
        os << "single-block stationarity defect " << fmt("%.2e", stationarity)
           << " (tol 1e-10); basis-state sweep E[max S] n=80 " << fmt("%.4f", flat.lhs) << " vs limit "
           << fmt("%.4f", flat.rhs) << (flat.passed ? " ok" : " VIOLATED");
        for (std::size_t n : {20u, 40u, 80u}) {
            const Aggregate& a = s.aggregates.at("max_entropy[n=" + std::to_string(n) + "]");
            os << "; n=" << n << " mean " << fmt("%.4f", a.mean) << " se " << fmt("%.4f", a.standard_error);
        }
        return Outcome{stationarity <= 1e-10 && flat.passed, os.str()};
    });

    std::string correlator_bytes;
    criterion("8_localization_diagnostics", [&] {
        const EnsembleResult r = run_ensemble(eigencorrelator_config());
        correlator_bytes = serialized(r);
        const DecayFit& e = r.fits.at("exponential");
        const DecayFit& p = r.fits.at("power");
        Outcome o;
        o.passed = e.residual < p.residual && e.parameter > 0.0 && std::isfinite(e.parameter);
        o.detail = "exponential residual " + fmt("%.4f", e.residual) + " vs power " + fmt("%.4f", p.residual) +
                   ", xi " + fmt("%.3f", e.parameter);
        return o;
    });

    criterion("9_determinism", [&] {
        bool ok = true;
        std::string detail;
        EnsembleConfig t = transport_config();
        t.threads = 3;
        const bool t_same = !transport_bytes.empty() && serialized(run_ensemble(t)) == transport_bytes;
        EnsembleConfig q = eigencorrelator_config();
        q.threads = 2;
        const bool q_same = !correlator_bytes.empty() && serialized(run_ensemble(q)) == correlator_bytes;
        EnsembleConfig e = sweep_config(PartitionKind::halves);
        e.sizes = {20, 40, 80};
        e.realizations = 8;
        e.threads = 1;
        const std::string e1 = serialized(run_ensemble(e));
        e.threads = 4;
        const bool e_same = e1 == serialized(run_ensemble(e));
        ok = t_same && q_same && e_same;
        detail = std::string("transport threads 1 vs 3 ") + (t_same ? "identical" : "DIFFER") +
                 ", eigencorrelator 1 vs 2 " + (q_same ? "identical" : "DIFFER") + ", entanglement 1 vs 4 " +
                 (e_same ? "identical" : "DIFFER");
        return Outcome{ok, detail};
    });

    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "NOT ACCEPTED", failures);
    return failures == 0 ? 0 : 1;
}
