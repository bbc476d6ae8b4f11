#include "xylab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xylab/error.hpp"

namespace xylab {

using nlohmann::json;

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Walks a parsed document, remembering the path for diagnostics.
class Field {
public:
    Field(const json& value, std::string path, const std::string& text) : value_(value), path_(std::move(path)), text_(text) {}

    [[noreturn]] void fail(const std::string& message) const {
        std::string where = "field '" + path_ + "'";
        if (const auto line = approximate_line()) {
            where = "line " + std::to_string(line) + ", " + where;
        }
        throw ConfigError(where + ": " + message);
    }

    const json& raw() const { return value_; }
    const std::string& path() const { return path_; }

    void expect_object(std::initializer_list<const char*> allowed) const {
        if (!value_.is_object()) {
            fail("expected an object");
        }
        for (const auto& [key, _] : value_.items()) {
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
                Field(value_[key], child_path(key), text_).fail("unknown field");
            }
        }
    }

    bool has(const char* key) const { return value_.contains(key); }

    Field operator[](const char* key) const {
        if (!value_.contains(key)) {
            fail(std::string("missing required field '") + key + "'");
        }
        return Field(value_.at(key), child_path(key), text_);
    }

    Field at(std::size_t i) const { return Field(value_.at(i), path_ + "[" + std::to_string(i) + "]", text_); }

    double number() const {
        if (!value_.is_number()) {
            fail("expected a number");
        }
        const double v = value_.get<double>();
        if (!std::isfinite(v)) {
            fail("expected a finite number");
        }
        return v;
    }

    std::size_t count() const {
        if (!value_.is_number_integer() || value_.get<long long>() < 0) {
            fail("expected a non-negative integer");
        }
        return value_.get<std::size_t>();
    }

    std::uint64_t seed() const {
        if (!value_.is_number_integer() || (value_.is_number_integer() && !value_.is_number_unsigned() &&
                                            value_.get<long long>() < 0)) {
            fail("expected a non-negative integer seed");
        }
        return value_.get<std::uint64_t>();
    }

    bool boolean() const {
        if (!value_.is_boolean()) {
            fail("expected true or false");
        }
        return value_.get<bool>();
    }

    std::string string() const {
        if (!value_.is_string()) {
            fail("expected a string");
        }
        return value_.get<std::string>();
    }

    std::size_t size() const {
        if (!value_.is_array()) {
            fail("expected an array");
        }
        return value_.size();
    }

    std::vector<std::size_t> counts() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < size(); ++i) {
            out.push_back(at(i).count());
        }
        return out;
    }

    std::vector<double> numbers() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < size(); ++i) {
            out.push_back(at(i).number());
        }
        return out;
    }

    std::pair<std::size_t, std::size_t> count_pair() const {
        if (size() != 2) {
            fail("expected [first, last]");
        }
        return {at(0).count(), at(1).count()};
    }

private:
    std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    // Line of the first textual occurrence of the path's keys, searched in order.
    std::size_t approximate_line() const {
        std::size_t pos = 0;
        std::size_t found = std::string::npos;
        std::stringstream ss(path_);
        std::string part;
        while (std::getline(ss, part, '.')) {
            const auto bracket = part.find('[');
            const std::string key = part.substr(0, bracket);
            const auto hit = text_.find("\"" + key + "\"", pos);
            if (hit == std::string::npos) {
                break;
            }
            found = hit;
            pos = hit + key.size() + 2;
        }
        return found == std::string::npos ? 0 : line_of_offset(text_, found);
    }

    const json& value_;
    std::string path_;
    const std::string& text_;
};

Distribution parse_distribution(const Field& f) {
    if (f.raw().is_number()) {
        return ConstantDistribution{f.number()};
    }
    if (!f.raw().is_object()) {
        f.fail("expected a distribution object or a number");
    }
    const std::string kind = f["kind"].string();
    Distribution d;
    if (kind == "constant") {
        f.expect_object({"kind", "value"});
        d = ConstantDistribution{f["value"].number()};
    } else if (kind == "uniform") {
        f.expect_object({"kind", "low", "high"});
        d = UniformDistribution{f["low"].number(), f["high"].number()};
    } else if (kind == "two_point") {
        f.expect_object({"kind", "first", "second", "p"});
        d = TwoPointDistribution{f["first"].number(), f["second"].number(), f["p"].number()};
    } else {
        f["kind"].fail("unknown distribution kind '" + kind + "' (constant, uniform, two_point)");
    }
    try {
        validate(d);
    } catch (const ConfigError& e) {
        f.fail(e.what());
    }
    return d;
}

json distribution_json(const Distribution& d) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ConstantDistribution>) {
                return {{"kind", "constant"}, {"value", x.value}};
            } else if constexpr (std::is_same_v<T, UniformDistribution>) {
                return {{"kind", "uniform"}, {"low", x.low}, {"high", x.high}};
            } else {
                return {{"kind", "two_point"}, {"first", x.first}, {"second", x.second}, {"p", x.p}};
            }
        },
        d);
}

CleanControl parse_control(const Field& f) {
    f.expect_object({"mu", "nu"});
    CleanControl c;
    if (f.has("mu")) {
        c.mu = f["mu"].number();
    }
    if (f.has("nu")) {
        c.nu = f["nu"].number();
    }
    return c;
}

TimeGridSpec parse_grid(const Field& f) {
    TimeGridSpec g;
    const std::string kind = f.has("kind") ? f["kind"].string() : "geometric";
    if (kind == "geometric") {
        f.expect_object({"kind", "count", "t_min", "t_max", "include_zero"});
        g.kind = TimeGridSpec::Kind::geometric;
        if (f.has("count")) g.count = f["count"].count();
        if (f.has("t_min")) g.t_min = f["t_min"].number();
        if (f.has("t_max")) g.t_max = f["t_max"].number();
        if (f.has("include_zero")) g.include_zero = f["include_zero"].boolean();
        if (g.count < 2) f["count"].fail("geometric grid needs at least 2 points");
        if (!(g.t_min > 0.0 && g.t_max > g.t_min)) f.fail("geometric grid needs 0 < t_min < t_max");
    } else if (kind == "linear") {
        f.expect_object({"kind", "count", "t_max"});
        g.kind = TimeGridSpec::Kind::linear;
        g.count = f["count"].count();
        g.t_max = f["t_max"].number();
        if (g.count < 2) f["count"].fail("linear grid needs at least 2 points");
        if (!(g.t_max > 0.0)) f["t_max"].fail("t_max must be positive");
    } else if (kind == "list") {
        f.expect_object({"kind", "times"});
        g.kind = TimeGridSpec::Kind::list;
        g.times = f["times"].numbers();
        if (g.times.empty()) f["times"].fail("time list is empty");
        for (std::size_t i = 0; i < g.times.size(); ++i) {
            if (g.times[i] < 0.0 || (i > 0 && g.times[i] <= g.times[i - 1])) {
                f["times"].fail("times must be non-negative and strictly increasing");
            }
        }
    } else {
        f["kind"].fail("unknown time grid kind '" + kind + "' (geometric, linear, list)");
    }
    return g;
}

void parse_transport(const Field& f, TransportSettings& s) {
    f.expect_object({"wall", "distances", "envelope_radius", "clean_control", "penetration_time",
                     "penetration_threshold", "fit_window"});
    if (f.has("wall")) {
        const auto [a, b] = f["wall"].count_pair();
        if (a < 1 || b < a) f["wall"].fail("wall must satisfy 1 <= first <= last");
        s.wall = Subinterval(a, b);
    }
    if (f.has("distances")) s.distances = f["distances"].counts();
    if (f.has("envelope_radius")) s.envelope_radius = f["envelope_radius"].count();
    if (f.has("clean_control")) s.clean_control = parse_control(f["clean_control"]);
    if (f.has("penetration_time")) s.penetration_time = f["penetration_time"].number();
    if (f.has("penetration_threshold")) s.penetration_threshold = f["penetration_threshold"].number();
    if (f.has("fit_window")) {
        std::tie(s.fit_lo, s.fit_hi) = f["fit_window"].count_pair();
    }
}

void parse_entanglement(const Field& f, EntanglementSettings& s) {
    f.expect_object({"partition", "block", "random_patterns", "exhaustive_limit", "diagnostic", "force_general",
                     "clean_control", "control_time"});
    if (f.has("partition")) {
        const Field p = f["partition"];
        if (p.raw().is_string()) {
            const std::string name = p.string();
            if (name == "halves") s.partition = PartitionKind::halves;
            else if (name == "whole") s.partition = PartitionKind::whole;
            else if (name == "singletons") s.partition = PartitionKind::singletons;
            else p.fail("unknown partition '" + name + "' (halves, whole, singletons, or {\"starts\": [...]})");
        } else {
            p.expect_object({"starts"});
            s.partition = PartitionKind::starts;
            s.block_starts = p["starts"].counts();
        }
    }
    if (f.has("block")) {
        const auto [a, b] = f["block"].count_pair();
        if (a < 1 || b < a) f["block"].fail("block must satisfy 1 <= first <= last");
        s.block = Subinterval(a, b);
    }
    if (f.has("random_patterns")) s.random_patterns = f["random_patterns"].count();
    if (f.has("exhaustive_limit")) s.exhaustive_limit = f["exhaustive_limit"].count();
    if (f.has("diagnostic")) s.diagnostic = f["diagnostic"].boolean();
    if (f.has("force_general")) s.force_general = f["force_general"].boolean();
    if (f.has("clean_control")) s.clean_control = parse_control(f["clean_control"]);
    if (f.has("control_time")) s.control_time = f["control_time"].number();
}

void parse_eigencorrelator(const Field& f, EigencorrelatorSettings& s) {
    f.expect_object({"flavor", "fit_window"});
    if (f.has("flavor")) {
        const std::string flavor = f["flavor"].string();
        if (flavor == "A") s.flavor = Flavor::isotropic;
        else if (flavor == "M") s.flavor = Flavor::anisotropic;
        else f["flavor"].fail("flavor must be \"A\" or \"M\"");
    }
    if (f.has("fit_window")) {
        std::tie(s.fit_lo, s.fit_hi) = f["fit_window"].count_pair();
    }
}

}  // namespace

ExperimentKind parse_kind(const std::string& name) {
    if (name == "transport") return ExperimentKind::transport;
    if (name == "entanglement") return ExperimentKind::entanglement;
    if (name == "eigencorrelator") return ExperimentKind::eigencorrelator;
    if (name == "oracle_verify") return ExperimentKind::oracle_verify;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

EnsembleConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("line " + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": malformed JSON: " + e.what());
    }
    const Field root(doc, "", text);
    root.expect_object({"experiment"});
    const Field f = root["experiment"];
    f.expect_object({"kind", "n", "sizes", "realizations", "seed", "disorder", "time_grid", "transport",
                     "entanglement", "eigencorrelator", "oracle", "output"});

    EnsembleConfig cfg;
    try {
        cfg.kind = parse_kind(f["kind"].string());
    } catch (const ConfigError& e) {
        f["kind"].fail(e.what());
    }
    if (f.has("n") == f.has("sizes")) {
        f.fail("exactly one of 'n' and 'sizes' is required");
    }
    cfg.sizes = f.has("n") ? std::vector<std::size_t>{f["n"].count()} : f["sizes"].counts();
    if (f.has("realizations")) cfg.realizations = f["realizations"].count();
    if (f.has("seed")) cfg.disorder.seed = f["seed"].seed();
    if (f.has("disorder")) {
        const Field d = f["disorder"];
        d.expect_object({"mu", "gamma", "nu"});
        if (d.has("mu")) cfg.disorder.mu = parse_distribution(d["mu"]);
        if (d.has("gamma")) cfg.disorder.gamma = parse_distribution(d["gamma"]);
        if (d.has("nu")) cfg.disorder.nu = parse_distribution(d["nu"]);
    }
    if (f.has("time_grid")) cfg.grid = parse_grid(f["time_grid"]);
    if (f.has("transport")) parse_transport(f["transport"], cfg.transport);
    if (f.has("entanglement")) parse_entanglement(f["entanglement"], cfg.entanglement);
    if (f.has("eigencorrelator")) parse_eigencorrelator(f["eigencorrelator"], cfg.eigencorrelator);
    if (f.has("oracle")) {
        const Field o = f["oracle"];
        o.expect_object({"tolerance"});
        if (o.has("tolerance")) cfg.oracle.tolerance = o["tolerance"].number();
    }
    if (f.has("output")) {
        const Field o = f["output"];
        o.expect_object({"series"});
        if (o.has("series")) cfg.keep_series = o["series"].boolean();
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        f.fail(e.what());
    }
    return cfg;
}

EnsembleConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

json config_to_json(const EnsembleConfig& c) {
    json e;
    e["kind"] = to_string(c.kind);
    e["sizes"] = c.sizes;
    e["realizations"] = c.realizations;
    e["seed"] = c.disorder.seed;
    e["disorder"] = {{"mu", distribution_json(c.disorder.mu)},
                     {"gamma", distribution_json(c.disorder.gamma)},
                     {"nu", distribution_json(c.disorder.nu)}};
    switch (c.grid.kind) {
        case TimeGridSpec::Kind::geometric:
            e["time_grid"] = {{"kind", "geometric"},
                              {"count", c.grid.count},
                              {"t_min", c.grid.t_min},
                              {"t_max", c.grid.t_max},
                              {"include_zero", c.grid.include_zero}};
            break;
        case TimeGridSpec::Kind::linear:
            e["time_grid"] = {{"kind", "linear"}, {"count", c.grid.count}, {"t_max", c.grid.t_max}};
            break;
        case TimeGridSpec::Kind::list: e["time_grid"] = {{"kind", "list"}, {"times", c.grid.times}}; break;
    }
    const auto control_json = [](const CleanControl& cc) { return json{{"mu", cc.mu}, {"nu", cc.nu}}; };
    switch (c.kind) {
        case ExperimentKind::transport: {
            const TransportSettings& t = c.transport;
            json j = {{"wall", {t.wall.a(), t.wall.b()}},
                      {"distances", t.distances},
                      {"envelope_radius", t.envelope_radius},
                      {"penetration_time", t.penetration_time},
                      {"penetration_threshold", t.penetration_threshold},
                      {"fit_window", {t.fit_lo, t.fit_hi}}};
            if (t.clean_control) j["clean_control"] = control_json(*t.clean_control);
            e["transport"] = j;
            break;
        }
        case ExperimentKind::entanglement: {
            const EntanglementSettings& s = c.entanglement;
            json j;
            switch (s.partition) {
                case PartitionKind::halves: j["partition"] = "halves"; break;
                case PartitionKind::whole: j["partition"] = "whole"; break;
                case PartitionKind::singletons: j["partition"] = "singletons"; break;
                case PartitionKind::starts: j["partition"] = {{"starts", s.block_starts}}; break;
            }
            if (s.block) j["block"] = {s.block->a(), s.block->b()};
            j["random_patterns"] = s.random_patterns;
            j["exhaustive_limit"] = s.exhaustive_limit;
            j["diagnostic"] = s.diagnostic;
            j["force_general"] = s.force_general;
            j["control_time"] = s.control_time;
            if (s.clean_control) j["clean_control"] = control_json(*s.clean_control);
            e["entanglement"] = j;
            break;
        }
        case ExperimentKind::eigencorrelator:
            e["eigencorrelator"] = {{"flavor", c.eigencorrelator.flavor == Flavor::isotropic ? "A" : "M"},
                                    {"fit_window", {c.eigencorrelator.fit_lo, c.eigencorrelator.fit_hi}}};
            break;
        case ExperimentKind::oracle_verify: e["oracle"] = {{"tolerance", c.oracle.tolerance}}; break;
    }
    e["output"] = {{"series", c.keep_series}};
    return json{{"experiment", e}};
}

}  // namespace xylab
