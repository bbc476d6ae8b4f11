#include "xylab/cli.hpp"

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xylab/config.hpp"
#include "xylab/ensemble.hpp"
#include "xylab/error.hpp"
#include "xylab/serialize.hpp"
#include "xylab/verify.hpp"

namespace xylab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::string out = "out";
    std::optional<std::size_t> threads;
    std::optional<std::uint64_t> seed;
};

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Run {
public:
    Run(std::string command, const Options& options)
        : command_(std::move(command)), options_(options), started_(utc_now()) {}

    void emit(const std::string& name, const std::string& text) {
        const fs::path path = fs::path(options_.out) / name;
        write_text(path, text);
        outputs_.push_back(path.string());
    }

    void finish(const std::optional<EnsembleConfig>& config, std::uint64_t seed) {
        json m;
        m["command"] = command_;
        m["config"] = config ? config_to_json(*config) : json(nullptr);
        m["version"] = kToolVersion;
        m["started_at"] = started_;
        m["finished_at"] = utc_now();
        m["outputs"] = outputs_;
        m["seed"] = seed;
        const fs::path path = fs::path(options_.out) / "manifest.json";
        write_text(path, m.dump(2) + "\n");
    }

private:
    std::string command_;
    const Options& options_;
    std::string started_;
    std::vector<std::string> outputs_;
};

EnsembleConfig prepare(const Options& options, ExperimentKind expected) {
    EnsembleConfig cfg = load_config(options.config);
    if (cfg.kind != expected) {
        throw ConfigError(std::string("config kind '") + to_string(cfg.kind) + "' does not match command '" +
                          to_string(expected) + "'");
    }
    if (options.seed) {
        cfg.disorder.seed = *options.seed;
    }
    cfg.threads = options.threads.value_or(default_threads());
    if (cfg.threads == 0) {
        throw ConfigError("--threads must be at least 1");
    }
    return cfg;
}

void report_verdicts(const EnsembleResult& result) {
    for (const auto& v : result.verdicts) {
        std::cout << (v.passed ? "PASS " : (v.informational ? "INFO " : "FAIL ")) << v.name << "  lhs=" << v.lhs
                  << " rhs=" << v.rhs;
        if (!v.detail.empty()) {
            std::cout << "  " << v.detail;
        }
        std::cout << '\n';
    }
    for (const auto& w : result.warnings) {
        std::cout << "warning: " << w << '\n';
    }
    if (result.rejected > 0) {
        std::cout << "rejected realizations: " << result.rejected << '\n';
    }
}

int experiment(const std::string& command, ExperimentKind kind, const Options& options) {
    const EnsembleConfig cfg = prepare(options, kind);
    Run run(command, options);
    const EnsembleResult result = run_ensemble(cfg);
    run.emit("summary.json", summary_json(result).dump(2) + "\n");
    run.emit("records.csv", records_csv(result));
    switch (kind) {
        case ExperimentKind::transport:
            run.emit("transport_series.csv", transport_series_csv(result));
            run.emit("density_profile.csv", density_profile_csv(result));
            if (result.correlator) {
                run.emit("correlator.csv", correlator_csv(*result.correlator));
            }
            break;
        case ExperimentKind::entanglement:
            for (std::size_t n : cfg.sizes) {
                run.emit("entropy_n" + std::to_string(n) + ".csv", entropy_csv(result, n));
            }
            run.emit("size_sweep.csv", size_sweep_csv(result));
            break;
        case ExperimentKind::eigencorrelator: {
            run.emit("correlator.csv", correlator_csv(*result.correlator));
            json fits = json::object();
            for (const auto& [name, fit] : result.fits) {
                fits[name] = fit_json(fit);
            }
            run.emit("fit.json", json{{"fits", fits}, {"warnings", result.warnings}}.dump(2) + "\n");
            break;
        }
        case ExperimentKind::oracle_verify: break;
    }
    run.finish(cfg, cfg.disorder.seed);
    report_verdicts(result);
    return result.all_passed() ? kExitOk : kExitVerdict;
}

int verify(const Options& options, const std::function<BlockMatrix(const ChainParameters&)>& builder) {
    Run run("verify", options);
    VerificationOptions vo;
    vo.anisotropic_builder = builder;
    if (options.seed) {
        vo.seed = *options.seed;
    }
    const std::vector<CheckResult> checks = run_verification_suite(vo);
    bool passed = all_passed(checks);
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  residual=" << c.residual
                  << " tolerance=" << c.tolerance << '\n';
    }
    json report = verification_json(checks);
    std::optional<EnsembleConfig> cfg;
    if (!options.config.empty()) {
        cfg = prepare(options, ExperimentKind::oracle_verify);
        const EnsembleResult result = run_ensemble(*cfg);
        report["ensemble"] = summary_json(result);
        report_verdicts(result);
        passed = passed && result.all_passed();
        report["all_passed"] = passed;
        run.emit("records.csv", records_csv(result));
    }
    run.emit("verify.json", report.dump(2) + "\n");
    run.finish(cfg, cfg ? cfg->disorder.seed : vo.seed);
    return passed ? kExitOk : kExitVerdict;
}

}  // namespace

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, build_anisotropic); }

int run_cli(int argc, const char* const* argv, const std::function<BlockMatrix(const ChainParameters&)>& builder) {
    CLI::App app{"Disordered XY chain simulator", "xylab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Options options;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", options.config, "Experiment configuration (JSON)");
        if (config_required) {
            c->required();
        }
        sub->add_option("--out", options.out, "Output directory")->capture_default_str();
        sub->add_option("--threads", options.threads, "Worker threads (default: XYLAB_THREADS or all cores)");
        sub->add_option("--seed", options.seed, "Master seed, overrides the config");
    };
    CLI::App* transport = app.add_subcommand("transport", "Particle transport out of a domain wall");
    CLI::App* entanglement = app.add_subcommand("entanglement", "Entanglement entropy after a quench");
    CLI::App* eigencorrelator = app.add_subcommand("eigencorrelator", "Eigenfunction correlator decay");
    CLI::App* verify_cmd = app.add_subcommand("verify", "Oracle verification suite");
    add_common(transport, true);
    add_common(entanglement, true);
    add_common(eigencorrelator, true);
    add_common(verify_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (transport->parsed()) {
            return experiment("transport", ExperimentKind::transport, options);
        }
        if (entanglement->parsed()) {
            return experiment("entanglement", ExperimentKind::entanglement, options);
        }
        if (eigencorrelator->parsed()) {
            return experiment("eigencorrelator", ExperimentKind::eigencorrelator, options);
        }
        return verify(options, builder);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IndexError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace xylab
