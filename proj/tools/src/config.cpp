#include <set>

#include <yaml-cpp/yaml.h>

#include "sae/error.hpp"
#include "sae/io.hpp"

namespace sae::io {

namespace {

// Error messages carry file:line:column of the offending node.
class Cfg {
public:
    Cfg(YAML::Node node, std::string file) : node_(std::move(node)), file_(std::move(file)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
        const auto m = at.Mark();
        std::string where = file_;
        if (m.line >= 0) where += ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
        throw InputError(where + ": " + msg);
    }

    void require_map(const YAML::Node& n, const std::string& what) const {
        if (!n.IsMap()) fail(n, what + " must be a mapping");
    }

    void allow_keys(const YAML::Node& n, std::initializer_list<const char*> keys) const {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!ok.contains(key)) fail(kv.first, "unknown field '" + key + "'");
        }
    }

    template <class T>
    T get(const YAML::Node& n, const std::string& key, const char* type) const {
        try {
            return n[key].as<T>();
        } catch (const YAML::Exception&) {
            fail(n[key], "field '" + key + "': expected " + type);
        }
    }

    double number(const YAML::Node& n, const std::string& key, double fallback) const {
        return n[key] ? get<double>(n, key, "a number") : fallback;
    }
    int integer(const YAML::Node& n, const std::string& key, int fallback) const {
        return n[key] ? get<int>(n, key, "an integer") : fallback;
    }
    bool boolean(const YAML::Node& n, const std::string& key, bool fallback) const {
        return n[key] ? get<bool>(n, key, "true or false") : fallback;
    }
    std::string text(const YAML::Node& n, const std::string& key, const std::string& fallback) const {
        return n[key] ? get<std::string>(n, key, "a string") : fallback;
    }
    std::uint64_t seed(const YAML::Node& n, const std::string& key, std::uint64_t fallback) const {
        return n[key] ? get<std::uint64_t>(n, key, "a nonnegative integer") : fallback;
    }
    std::vector<double> numbers(const YAML::Node& n, const std::string& key) const {
        if (!n[key].IsSequence() || n[key].size() == 0) fail(n[key], "field '" + key + "': expected a non-empty list");
        return get<std::vector<double>>(n, key, "a list of numbers");
    }

    // Runs a parser that throws InputError and relocates its message to `at`.
    template <class F>
    auto parsed(const YAML::Node& n, const std::string& key, F&& parse) const {
        try {
            return parse(get<std::string>(n, key, "a string"));
        } catch (const InputError& e) {
            fail(n[key], "field '" + key + "': " + e.what());
        }
    }

    fs::path path(const YAML::Node& n, const std::string& key, const fs::path& base) const {
        if (!n[key]) fail(n, "missing field '" + key + "'");
        fs::path p = get<std::string>(n, key, "a path");
        return p.is_relative() ? base / p : p;
    }

    const YAML::Node& root() const { return node_; }

private:
    YAML::Node node_;
    std::string file_;
};

Cfg open(const fs::path& path) {
    const auto text = read_file(path);
    try {
        YAML::Node node = YAML::Load(text);
        if (!node.IsMap()) throw InputError(path.string() + ": top level must be a mapping");
        return Cfg(node, path.string());
    } catch (const YAML::ParserException& e) {
        throw InputError(path.string() + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                         ": " + e.msg);
    }
}

// Fields shared by estimate and tune.
void read_estimator(const Cfg& cfg, const YAML::Node& n, EstimatorSpec& spec) {
    if (n["method"]) spec.method = cfg.parsed(n, "method", parse_method);
    if (n["scope"]) spec.scope = cfg.parsed(n, "scope", parse_scope);
    spec.c = cfg.number(n, "c", spec.c);
    if (n["gamma"]) {
        const auto g = cfg.text(n, "gamma", "");
        if (g == "auto")
            spec.gamma.reset();
        else
            spec.gamma = cfg.number(n, "gamma", 1.0);
    }
    if (n["scale"]) spec.scale_kind = cfg.parsed(n, "scale", parse_scale_kind);
    if (n["centering"]) spec.gamma_options.centering = cfg.parsed(n, "centering", parse_centering);
    if (n["reference"])
        spec.reference = cfg.parsed(n, "reference", [](const std::string& s) {
            if (s == "combined") return PseudoReference::Combined;
            if (s == "fitted") return PseudoReference::FittedVector;
            throw InputError("unknown pseudo-value reference '" + s + "'");
        });
}

}  // namespace

ModelKind parse_model_kind(const std::string& text) {
    if (text == "reblup") return ModelKind::Reblup;
    if (text == "mq") return ModelKind::MQuantile;
    throw InputError("unknown model '" + text + "' (reblup or mq)");
}

const char* to_string(ModelKind kind) { return kind == ModelKind::Reblup ? "reblup" : "mq"; }

RefitMode parse_refit_mode(const std::string& text) {
    if (text == "full") return RefitMode::Full;
    if (text == "reuse-variance") return RefitMode::ReuseVariance;
    throw InputError("unknown refit mode '" + text + "'");
}

EstimateConfig load_estimate_config(const fs::path& path) {
    const auto cfg = open(path);
    const auto& n = cfg.root();
    cfg.allow_keys(n, {"sample", "population", "model", "huber_c", "method", "scope", "c", "gamma", "scale",
                       "centering", "reference", "export_cdf"});
    const auto base = path.parent_path();
    EstimateConfig out;
    out.sample = cfg.path(n, "sample", base);
    out.population = cfg.path(n, "population", base);
    if (n["model"]) out.model = cfg.parsed(n, "model", parse_model_kind);
    out.huber_c = cfg.number(n, "huber_c", out.huber_c);
    read_estimator(cfg, n, out.spec);
    out.export_cdf = cfg.boolean(n, "export_cdf", false);
    return out;
}

TuneConfig load_tune_config(const fs::path& path) {
    const auto cfg = open(path);
    const auto& n = cfg.root();
    cfg.allow_keys(n, {"sample", "population", "model", "huber_c", "method", "scope", "scale", "centering",
                       "reference", "grid", "refit", "seed", "threads"});
    const auto base = path.parent_path();
    TuneConfig out;
    out.sample = cfg.path(n, "sample", base);
    out.population = cfg.path(n, "population", base);
    if (n["model"]) out.model = cfg.parsed(n, "model", parse_model_kind);
    out.huber_c = cfg.number(n, "huber_c", out.huber_c);
    read_estimator(cfg, n, out.spec);
    if (n["grid"]) {
        const auto g = n["grid"];
        cfg.require_map(g, "grid");
        cfg.allow_keys(g, {"c", "gamma", "B", "c2"});
        auto c = g["c"] ? cfg.numbers(g, "c") : std::vector<double>{1.0, 2.0, 3.0};
        auto gamma = g["gamma"] ? cfg.numbers(g, "gamma") : std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
        out.grid = TuningGrid::product(c, gamma, cfg.integer(g, "B", 100));
        if (g["c2"]) out.grid.c2 = cfg.number(g, "c2", 0.0);
        try {
            out.grid.validate();
        } catch (const InputError& e) {
            cfg.fail(g, e.what());
        }
    }
    if (n["refit"]) out.refit = cfg.parsed(n, "refit", parse_refit_mode);
    out.seed = cfg.seed(n, "seed", out.seed);
    out.threads = static_cast<unsigned>(cfg.integer(n, "threads", 0));
    return out;
}

SimulateConfig load_simulate_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
    const auto cfg = open(path);
    const auto& n = cfg.root();
    cfg.allow_keys(n, {"seed", "threads", "scenarios"});
    SimulateConfig out;
    out.seed = seed_override ? *seed_override : cfg.seed(n, "seed", out.seed);
    out.threads = static_cast<unsigned>(cfg.integer(n, "threads", 0));
    const auto list = n["scenarios"];
    if (!list || !list.IsSequence() || list.size() == 0) cfg.fail(list ? list : n, "'scenarios' must be a non-empty list");
    std::uint64_t index = 0;
    for (const auto& sn : list) {
        cfg.require_map(sn, "scenario");
        cfg.allow_keys(sn, {"name", "lambda", "centered", "d", "N", "n", "reps", "seed", "methods", "tuning",
                            "sigma_u", "error_scale", "nu", "c_reblup", "c_if", "huber_c", "scale", "centering",
                            "reference", "grid"});
        Scenario s;
        s.name = cfg.text(sn, "name", "scenario" + std::to_string(index + 1));
        if (!sn["lambda"]) cfg.fail(sn, "scenario '" + s.name + "': missing field 'lambda'");
        s.lambda = cfg.number(sn, "lambda", 1.0);
        s.centered = cfg.boolean(sn, "centered", true);
        s.d = cfg.integer(sn, "d", s.d);
        s.big_n = cfg.integer(sn, "N", s.big_n);
        s.n = cfg.integer(sn, "n", s.n);
        s.reps = cfg.integer(sn, "reps", s.reps);
        s.nu = cfg.number(sn, "nu", s.nu);
        s.sigma_u = cfg.number(sn, "sigma_u", s.sigma_u);
        s.error_scale = cfg.number(sn, "error_scale", s.error_scale);
        s.c_reblup = cfg.number(sn, "c_reblup", s.c_reblup);
        s.c_if = cfg.number(sn, "c_if", s.c_if);
        s.huber_c = cfg.number(sn, "huber_c", s.huber_c);
        // Without an explicit seed, scenario k gets the k-th split of the run seed.
        s.seed = sn["seed"] && !seed_override ? cfg.seed(sn, "seed", 0) : split_seed(out.seed, index);
        if (sn["methods"]) {
            const auto ms = sn["methods"];
            if (!ms.IsSequence() || ms.size() == 0) cfg.fail(ms, "field 'methods': expected a non-empty list");
            for (const auto& m : ms) {
                try {
                    s.methods.push_back(parse_sim_method(m.as<std::string>()));
                } catch (const std::exception& e) {
                    cfg.fail(m, std::string("field 'methods': ") + e.what());
                }
            }
        } else {
            s.methods = {SimMethod::Reblup, SimMethod::ReblupSbc, SimMethod::ReblupAbc, SimMethod::MqSbc,
                         SimMethod::MqAbc,  SimMethod::IfSbc,     SimMethod::IfAbc};
        }
        if (sn["tuning"]) s.tuning = cfg.parsed(sn, "tuning", parse_tuning_mode);
        if (sn["scale"]) s.scale_kind = cfg.parsed(sn, "scale", parse_scale_kind);
        if (sn["centering"]) s.gamma_options.centering = cfg.parsed(sn, "centering", parse_centering);
        if (sn["grid"]) {
            const auto g = sn["grid"];
            cfg.require_map(g, "grid");
            cfg.allow_keys(g, {"c", "gamma", "B", "c2"});
            s.bootstrap_grid = TuningGrid::product(g["c"] ? cfg.numbers(g, "c") : std::vector<double>{1.0, 2.0, 3.0},
                                                   g["gamma"] ? cfg.numbers(g, "gamma")
                                                              : std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5, 2.0},
                                                   cfg.integer(g, "B", 100));
            if (g["c2"]) s.bootstrap_grid.c2 = cfg.number(g, "c2", 0.0);
        }
        try {
            s.validate();
            if (s.tuning == TuningMode::Bootstrap) s.bootstrap_grid.validate();
        } catch (const InputError& e) {
            cfg.fail(sn, e.what());
        }
        out.scenarios.push_back(std::move(s));
        ++index;
    }
    return out;
}

}  // namespace sae::io
