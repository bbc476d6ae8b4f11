#pragma once

// CSV and JSON emission. Floats in CSV use 17 significant digits.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "xylab/ensemble.hpp"
#include "xylab/spectral.hpp"
#include "xylab/verify.hpp"

namespace xylab {

inline constexpr int kSummarySchemaVersion = 1;

std::string format_double(double x);

/// r,Q_max,Q_mean,samples
std::string correlator_csv(const CorrelatorProfile& profile);
/// t,observable,realization_id,value; ensemble means use realization_id "mean"
std::string transport_series_csv(const EnsembleResult& result);
/// t,site,mean_density
std::string density_profile_csv(const EnsembleResult& result);
/// realization_id,pattern_id,t,entropy_nats,entropy_qubits,diagnostic_bound for chain size n
std::string entropy_csv(const EnsembleResult& result, std::size_t n);
/// n,count,mean_max_entropy,standard_error,max
std::string size_sweep_csv(const EnsembleResult& result);
/// realization_id,sites,seed,rejected,<value keys...>
std::string records_csv(const EnsembleResult& result);

nlohmann::json fit_json(const DecayFit& fit);
nlohmann::json summary_json(const EnsembleResult& result);
nlohmann::json verification_json(const std::vector<CheckResult>& checks);

/// Writes text, creating parent directories; throws Error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace xylab
