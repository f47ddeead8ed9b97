#include "sae/commands.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "sae/error.hpp"
#include "sae/io.hpp"

#ifndef SAE_VERSION
#define SAE_VERSION "0.0.0"
#endif

namespace sae::io {

namespace {

using Json = nlohmann::ordered_json;

// Metadata holds no timestamps so that reruns are byte-identical.
Json metadata(const std::string& command, const fs::path& config) {
    Json j;
    j["version"] = SAE_VERSION;
    j["command"] = command;
    if (!config.empty()) {
        j["config"] = config.filename().string();
        j["config_sha256"] = sha256_hex(read_file(config));
    }
    return j;
}

void write_metadata(const fs::path& out, const Json& j) { write_file(out / "metadata.json", j.dump(2) + "\n"); }

double parse_c(const CommandOptions& o) {
    if (!(*o.c > 0.0)) throw InputError("--c must be positive");
    return *o.c;
}

void apply_gamma(const std::string& text, EstimatorSpec& spec) {
    if (text == "auto") {
        spec.gamma.reset();
        return;
    }
    spec.gamma = parse_number(text, "--gamma");
}

std::vector<SimMethod> parse_method_list(const std::string& text) {
    std::vector<SimMethod> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        out.push_back(parse_sim_method(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

Json spec_json(const EstimatorSpec& spec) {
    Json j;
    j["method"] = to_string(spec.method);
    j["scope"] = to_string(spec.scope);
    j["c"] = spec.c;
    j["gamma"] = spec.gamma ? Json(*spec.gamma) : Json("auto");
    j["scale"] = to_string(spec.scale_kind);
    j["centering"] = to_string(spec.gamma_options.centering);
    j["reference"] = spec.reference == PseudoReference::Combined ? "combined" : "fitted";
    return j;
}

Json inputs_json(const fs::path& sample, const fs::path& population) {
    Json j;
    j["sample"] = sample.filename().string();
    j["sample_sha256"] = sha256_hex(read_file(sample));
    j["population"] = population.filename().string();
    j["population_sha256"] = sha256_hex(read_file(population));
    return j;
}

// Adds (c, 1) for every c so the symmetric baseline is always on the surface.
void ensure_unit_gamma(TuningGrid& grid) {
    std::vector<double> cs;
    for (const auto& [c, g] : grid.cells)
        if (std::find(cs.begin(), cs.end(), c) == cs.end()) cs.push_back(c);
    for (double c : cs)
        if (std::none_of(grid.cells.begin(), grid.cells.end(),
                         [&](const auto& cell) { return cell.first == c && cell.second == 1.0; }))
            grid.cells.emplace_back(c, 1.0);
    std::stable_sort(grid.cells.begin(), grid.cells.end());
}

}  // namespace

void cmd_simulate(const CommandOptions& o, std::ostream& log) {
    if (o.config.empty()) throw InputError("simulate needs --config");
    if (o.scope || o.c || o.gamma || o.sample || o.population || o.export_cdf)
        throw InputError("simulate accepts only --config, --out, --seed, --threads and --method");
    auto cfg = load_simulate_config(o.config, o.seed);
    if (o.method) {
        const auto methods = parse_method_list(*o.method);
        for (auto& s : cfg.scenarios) s.methods = methods;
    }
    const unsigned threads = o.threads.value_or(cfg.threads);

    std::vector<ScenarioResult> results;
    for (const auto& s : cfg.scenarios) {
        log << "scenario " << s.name << " (" << s.reps << " replicates)" << std::endl;
        results.push_back(run_scenario(s, threads));
        write_csv(o.out / ("scenario_" + s.name + ".csv"), scenario_table(results.back()));
    }
    write_csv(o.out / "summary.csv", summary_table(results));
    const auto text = summary_text(results);
    write_file(o.out / "summary.txt", text);
    log << text;

    Json meta = metadata("simulate", o.config);
    meta["seed"] = cfg.seed;
    Json scen = Json::array();
    for (const auto& s : cfg.scenarios) {
        Json j;
        j["name"] = s.name;
        j["seed"] = s.seed;
        Json ms = Json::array();
        for (auto m : s.methods) ms.push_back(to_string(m));
        j["methods"] = ms;
        scen.push_back(j);
    }
    meta["scenarios"] = scen;
    write_metadata(o.out, meta);
}

void cmd_estimate(const CommandOptions& o, std::ostream& log) {
    EstimateConfig cfg;
    if (!o.config.empty()) cfg = load_estimate_config(o.config);
    if (o.sample) cfg.sample = *o.sample;
    if (o.population) cfg.population = *o.population;
    if (cfg.sample.empty() || cfg.population.empty())
        throw InputError("estimate needs a sample and a population (config or --sample/--population)");
    if (o.method) cfg.spec.method = parse_method(*o.method);
    if (o.scope) cfg.spec.scope = parse_scope(*o.scope);
    if (o.c) cfg.spec.c = parse_c(o);
    if (o.gamma) apply_gamma(*o.gamma, cfg.spec);
    if (o.seed) throw InputError("estimate is deterministic and takes no --seed");
    cfg.export_cdf = cfg.export_cdf || o.export_cdf;
    if (cfg.export_cdf && is_if_method(cfg.spec.method))
        throw InputError("CDF export needs a CDF-based method, not " + std::string(to_string(cfg.spec.method)));
    cfg.spec.keep_cdf = cfg.export_cdf;

    const auto data = load_survey(cfg.sample, cfg.population);
    const auto model = fit_model(data, cfg.model, cfg.huber_c);
    const auto result = estimate_gini(model, data, cfg.spec);

    write_csv(o.out / "estimates.csv", estimates_table(result));
    if (cfg.export_cdf) write_csv(o.out / "cdf.csv", cdf_table(result));
    log << "estimated " << result.areas.size() << " areas with " << to_string(cfg.spec.method) << std::endl;

    Json meta = metadata("estimate", o.config);
    meta["seed"] = nullptr;
    meta["inputs"] = inputs_json(cfg.sample, cfg.population);
    meta["model"] = to_string(cfg.model);
    meta["huber_c"] = cfg.huber_c;
    meta["estimator"] = spec_json(cfg.spec);
    if (result.pooled_gamma) {
        meta["pooled_gamma"] = result.pooled_gamma->gamma;
        meta["pooled_gamma_clamped"] = result.pooled_gamma->clamped;
    }
    std::size_t floored = 0, out_of_range = 0;
    for (const auto& a : result.areas) {
        floored += a.floored_points;
        out_of_range += a.out_of_range ? 1 : 0;
    }
    meta["floored_points"] = floored;
    meta["out_of_range_areas"] = out_of_range;
    write_metadata(o.out, meta);
}

void cmd_tune(const CommandOptions& o, std::ostream& log) {
    TuneConfig cfg;
    if (!o.config.empty()) cfg = load_tune_config(o.config);
    if (o.sample) cfg.sample = *o.sample;
    if (o.population) cfg.population = *o.population;
    if (cfg.sample.empty() || cfg.population.empty())
        throw InputError("tune needs a sample and a population (config or --sample/--population)");
    if (o.export_cdf) throw InputError("tune does not export CDFs");
    if (o.method) cfg.spec.method = parse_method(*o.method);
    if (o.scope) cfg.spec.scope = parse_scope(*o.scope);
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    // --c / --gamma pin that axis of the grid.
    if (o.c || o.gamma) {
        std::vector<double> cs, gs;
        for (const auto& [c, g] : cfg.grid.cells) {
            if (std::find(cs.begin(), cs.end(), c) == cs.end()) cs.push_back(c);
            if (std::find(gs.begin(), gs.end(), g) == gs.end()) gs.push_back(g);
        }
        if (o.c) cs = {parse_c(o)};
        if (o.gamma) {
            if (*o.gamma == "auto") throw InputError("tune selects gamma itself; --gamma must be a number");
            gs = {parse_number(*o.gamma, "--gamma")};
        }
        auto grid = TuningGrid::product(cs, gs, cfg.grid.B);
        grid.c2 = cfg.grid.c2;
        cfg.grid = std::move(grid);
    }
    if (cfg.spec.method == Method::Plugin) throw InputError("the plug-in estimator has no tuning constants");
    ensure_unit_gamma(cfg.grid);
    cfg.grid.validate();

    const auto data = load_survey(cfg.sample, cfg.population);
    const auto model = fit_model(data, cfg.model, cfg.huber_c);
    TuneOptions topt;
    topt.refit = cfg.refit;
    topt.threads = cfg.threads;
    topt.reblup.huber = HuberConfig{cfg.huber_c};
    topt.mq.huber = HuberConfig{cfg.huber_c};
    const auto result = bootstrap_tune(data, model, cfg.grid, cfg.spec, cfg.seed, topt);

    write_csv(o.out / "surface.csv", surface_table(result));
    write_csv(o.out / "chosen.csv", chosen_table(result));
    log << "tuned " << result.areas.size() << " areas over " << cfg.grid.cells.size() << " grid cells, "
        << result.replicates << " replicates" << std::endl;

    Json meta = metadata("tune", o.config);
    meta["seed"] = cfg.seed;
    meta["inputs"] = inputs_json(cfg.sample, cfg.population);
    meta["model"] = to_string(cfg.model);
    meta["huber_c"] = cfg.huber_c;
    Json est = spec_json(cfg.spec);
    est.erase("c");
    est.erase("gamma");
    meta["estimator"] = est;
    Json grid;
    Json cells = Json::array();
    for (const auto& [c, g] : cfg.grid.cells) cells.push_back(Json::array({c, g}));
    grid["cells"] = cells;
    grid["B"] = cfg.grid.B;
    grid["c2"] = result.c2;
    meta["grid"] = grid;
    meta["refit"] = to_string(cfg.refit);
    meta["replicates"] = result.replicates;
    meta["failed_replicates"] = result.failed_replicates;
    Json excluded = Json::array();
    for (const auto& a : result.areas)
        if (a.excluded) excluded.push_back(a.area_id);
    meta["excluded_areas"] = excluded;
    write_metadata(o.out, meta);
}

int run_command(const std::string& name, const CommandOptions& options, std::ostream& log, std::ostream& err) {
    try {
        if (name == "simulate")
            cmd_simulate(options, log);
        else if (name == "estimate")
            cmd_estimate(options, log);
        else if (name == "tune")
            cmd_tune(options, log);
        else
            throw InputError("unknown command '" + name + "'");
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sae::io
