#pragma once

// Disorder ensembles: deterministic parallel execution over realizations,
// aggregation and theorem verdicts.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xylab/dynamics.hpp"
#include "xylab/entanglement.hpp"
#include "xylab/model.hpp"
#include "xylab/spectral.hpp"

namespace xylab {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index runs exactly once;
/// the caller writes results into per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Default worker count: XYLAB_THREADS if set and positive, otherwise hardware concurrency.
std::size_t default_threads();

enum class ExperimentKind { transport, entanglement, eigencorrelator, oracle_verify };

const char* to_string(ExperimentKind k) noexcept;

struct TimeGridSpec {
    enum class Kind { geometric, linear, list };
    Kind kind = Kind::geometric;
    std::size_t count = 200;
    double t_min = 0.05;
    double t_max = 500.0;
    bool include_zero = true;
    std::vector<double> times;

    TimeGrid build() const;
};

/// Clean (disorder-free) comparison chain.
struct CleanControl {
    double mu = 1.0;
    double nu = 0.0;
};

struct TransportSettings {
    Subinterval wall{21, 30};
    /// Observable sets S_d = {a - d, b + d} (sites outside the chain dropped).
    std::vector<std::size_t> distances{5, 10, 15};
    /// K = sites within this distance of S, for the envelope bound.
    std::size_t envelope_radius = 2;
    std::optional<CleanControl> clean_control;
    double penetration_time = 50.0;
    double penetration_threshold = 0.05;
    /// Window of the power-law fit of Q(r) that supplies beta.
    std::size_t fit_lo = 1;
    std::size_t fit_hi = 0;  ///< 0 means n - 1
};

enum class PartitionKind { halves, whole, singletons, starts };

struct EntanglementSettings {
    PartitionKind partition = PartitionKind::halves;
    std::vector<std::size_t> block_starts;  ///< for PartitionKind::starts
    /// Subsystem; empty means [1, n/2].
    std::optional<Subinterval> block;
    std::size_t random_patterns = 16;
    std::size_t exhaustive_limit = 12;
    bool diagnostic = true;
    bool force_general = false;
    std::optional<CleanControl> clean_control;
    double control_time = 50.0;
};

struct EigencorrelatorSettings {
    Flavor flavor = Flavor::isotropic;
    std::size_t fit_lo = 1;
    std::size_t fit_hi = 0;  ///< 0 means n / 2
};

struct OracleSettings {
    double tolerance = 1e-8;
};

struct EnsembleConfig {
    ExperimentKind kind = ExperimentKind::transport;
    std::vector<std::size_t> sizes{50};
    std::size_t realizations = 1;
    DisorderSpec disorder;
    TimeGridSpec grid;
    TransportSettings transport;
    EntanglementSettings entanglement;
    EigencorrelatorSettings eigencorrelator;
    OracleSettings oracle;
    std::size_t threads = 1;
    /// Keep per-realization time series (needed for series CSV output).
    bool keep_series = true;

    /// Throws ConfigError on invalid geometry or counts.
    void validate() const;
};

struct RealizationRecord {
    std::size_t id = 0;      ///< 0-based slot index
    std::size_t sites = 0;
    std::uint64_t seed = 0;
    bool rejected = false;
    std::string reject_reason;
    std::map<std::string, double> values;
    /// Transport: observable -> value per grid time.
    std::map<std::string, std::vector<double>> series;
    /// Entanglement: one entry per battery pattern.
    std::vector<EntropySeries> entropy;
};

struct Aggregate {
    std::size_t count = 0;
    double mean = 0.0;
    double standard_error = 0.0;
    double max = 0.0;
};

struct Verdict {
    std::string name;
    bool passed = false;
    /// Informational verdicts are recorded but do not fail the run.
    bool informational = false;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string detail;
};

struct EnsembleResult {
    EnsembleConfig config;
    std::vector<RealizationRecord> records;
    /// "key" or "key[n=..]" -> statistics over accepted records.
    std::map<std::string, Aggregate> aggregates;
    std::size_t rejected = 0;
    std::optional<CorrelatorProfile> correlator;
    std::map<std::string, DecayFit> fits;
    /// Transport: observable -> mean over realizations per grid time.
    std::map<std::string, std::vector<double>> mean_series;
    /// Transport: mean site densities, grid time major.
    std::vector<std::vector<double>> mean_density;
    /// Clean control numbers (penetration depth, max entropy, ...).
    std::map<std::string, double> control;
    std::vector<Verdict> verdicts;
    std::vector<std::string> warnings;

    bool all_passed() const;
};

Aggregate summarize(const std::vector<double>& values);

/// Recomputes `aggregates` from `records`.
std::map<std::string, Aggregate> recompute_aggregates(const std::vector<RealizationRecord>& records,
                                                      bool per_size);

EnsembleResult run_ensemble(const EnsembleConfig& config);

/// Verdicts of the transport bounds, the distance monotonicity and the decay comparison.
std::vector<Verdict> check_transport_theorem(const EnsembleResult& result);

/// Flatness of E[max entropy] across the size sweep; needs at least 3 sizes.
Verdict check_area_law(const EnsembleResult& result);

/// Observable sets of the transport experiment, keyed by distance.
std::vector<std::pair<std::size_t, SiteSet>> transport_sets(const TransportSettings& settings, std::size_t n);

/// Number of sites whose density deviates from eta by more than `threshold` at time t.
std::size_t penetration_depth(const EigenSystem& eig, const DensityProfile& profile, double t, double threshold);

/// Partition and subsystem used by the entanglement experiment at size n.
Partition entanglement_partition(const EntanglementSettings& settings, std::size_t n);
Subinterval entanglement_block(const EntanglementSettings& settings, std::size_t n);

}  // namespace xylab
