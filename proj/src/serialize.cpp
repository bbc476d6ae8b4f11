#include "xylab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "xylab/config.hpp"
#include "xylab/error.hpp"

namespace xylab {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string correlator_csv(const CorrelatorProfile& profile) {
    std::string out = "r,Q_max,Q_mean,samples\n";
    for (std::size_t r = 0; r < profile.size(); ++r) {
        out += std::to_string(r) + ',' + format_double(profile.q_max[r]) + ',' + format_double(profile.q_mean[r]) +
               ',' + std::to_string(profile.samples) + '\n';
    }
    return out;
}

std::string transport_series_csv(const EnsembleResult& result) {
    const TimeGrid grid = result.config.grid.build();
    std::string out = "t,observable,realization_id,value\n";
    for (const auto& rec : result.records) {
        for (const auto& [name, values] : rec.series) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                out += format_double(grid[i]) + ',' + name + ',' + std::to_string(rec.id) + ',' +
                       format_double(values[i]) + '\n';
            }
        }
    }
    for (const auto& [name, values] : result.mean_series) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out += format_double(grid[i]) + ',' + name + ",mean," + format_double(values[i]) + '\n';
        }
    }
    return out;
}

std::string density_profile_csv(const EnsembleResult& result) {
    const TimeGrid grid = result.config.grid.build();
    std::string out = "t,site,mean_density\n";
    for (std::size_t i = 0; i < result.mean_density.size(); ++i) {
        for (std::size_t j = 0; j < result.mean_density[i].size(); ++j) {
            out += format_double(grid[i]) + ',' + std::to_string(j + 1) + ',' +
                   format_double(result.mean_density[i][j]) + '\n';
        }
    }
    return out;
}

std::string entropy_csv(const EnsembleResult& result, std::size_t n) {
    const TimeGrid grid = result.config.grid.build();
    const double ln2 = std::log(2.0);
    std::string out = "realization_id,pattern_id,t,entropy_nats,entropy_qubits,diagnostic_bound\n";
    for (const auto& rec : result.records) {
        if (rec.sites != n || rec.rejected) {
            continue;
        }
        for (std::size_t p = 0; p < rec.entropy.size(); ++p) {
            const EntropySeries& s = rec.entropy[p];
            for (std::size_t i = 0; i < s.entropy.size(); ++i) {
                out += std::to_string(rec.id) + ',' + std::to_string(p) + ',' + format_double(grid[i]) + ',' +
                       format_double(s.entropy[i]) + ',' + format_double(s.entropy[i] / ln2) + ',';
                if (!s.diagnostic.empty()) {
                    out += format_double(s.diagnostic[i]);
                }
                out += '\n';
            }
        }
    }
    return out;
}

std::string size_sweep_csv(const EnsembleResult& result) {
    std::string out = "n,count,mean_max_entropy,standard_error,max\n";
    for (std::size_t n : result.config.sizes) {
        const auto it = result.aggregates.find("max_entropy[n=" + std::to_string(n) + "]");
        if (it == result.aggregates.end()) {
            continue;
        }
        const Aggregate& a = it->second;
        out += std::to_string(n) + ',' + std::to_string(a.count) + ',' + format_double(a.mean) + ',' +
               format_double(a.standard_error) + ',' + format_double(a.max) + '\n';
    }
    return out;
}

std::string records_csv(const EnsembleResult& result) {
    std::set<std::string> keys;
    for (const auto& rec : result.records) {
        for (const auto& kv : rec.values) {
            keys.insert(kv.first);
        }
    }
    std::string out = "realization_id,sites,seed,rejected";
    for (const auto& k : keys) {
        out += ',' + k;
    }
    out += '\n';
    for (const auto& rec : result.records) {
        out += std::to_string(rec.id) + ',' + std::to_string(rec.sites) + ',' + std::to_string(rec.seed) + ',' +
               (rec.rejected ? "1" : "0");
        for (const auto& k : keys) {
            out += ',';
            if (const auto it = rec.values.find(k); it != rec.values.end()) {
                out += format_double(it->second);
            }
        }
        out += '\n';
    }
    return out;
}

json fit_json(const DecayFit& fit) {
    json j;
    j["model"] = to_string(fit.model);
    j["amplitude"] = fit.amplitude;
    j[fit.model == DecayModel::exponential ? "xi" : "beta"] = fit.parameter;
    j["slope"] = fit.slope;
    j["slope_error"] = fit.slope_error;
    j["residual"] = fit.residual;
    j["window"] = {fit.r_lo, fit.r_hi};
    j["points"] = fit.points;
    return j;
}

json summary_json(const EnsembleResult& result) {
    const TimeGrid grid = result.config.grid.build();
    json j;
    j["schema_version"] = kSummarySchemaVersion;
    j["kind"] = to_string(result.config.kind);
    j["config"] = config_to_json(result.config);
    j["seed"] = result.config.disorder.seed;
    j["grid"] = {{"points", grid.size()}, {"t_first", grid[0]}, {"t_last", grid[grid.size() - 1]}};
    j["realizations"] = result.records.size();
    j["rejected"] = result.rejected;
    json aggs = json::object();
    for (const auto& [key, a] : result.aggregates) {
        aggs[key] = {{"count", a.count}, {"mean", a.mean}, {"standard_error", a.standard_error}, {"max", a.max}};
    }
    j["aggregates"] = aggs;
    j["control"] = result.control;
    json fits = json::object();
    for (const auto& [name, fit] : result.fits) {
        fits[name] = fit_json(fit);
    }
    j["fits"] = fits;
    json verdicts = json::array();
    for (const auto& v : result.verdicts) {
        verdicts.push_back({{"name", v.name},
                            {"passed", v.passed},
                            {"informational", v.informational},
                            {"lhs", v.lhs},
                            {"rhs", v.rhs},
                            {"detail", v.detail}});
    }
    j["verdicts"] = verdicts;
    j["all_passed"] = result.all_passed();
    j["warnings"] = result.warnings;
    j["statistics"] = "statistical margins are 2 standard errors, no multiple-comparison correction";
    return j;
}

json verification_json(const std::vector<CheckResult>& checks) {
    json j;
    j["schema_version"] = kSummarySchemaVersion;
    json list = json::array();
    for (const auto& c : checks) {
        list.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    }
    j["checks"] = list;
    j["all_passed"] = all_passed(checks);
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary);
    f << text;
    f.close();
    if (!f) {
        throw Error("cannot write " + path.string());
    }
}

}  // namespace xylab
