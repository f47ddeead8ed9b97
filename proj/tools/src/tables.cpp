#include <fmt/format.h>

#include "sae/io.hpp"

namespace sae::io {

namespace {

std::string flag(bool b) { return b ? "1" : "0"; }
std::string num(double v) { return format_number(v); }
std::string count(std::size_t v) { return std::to_string(v); }

}  // namespace

CsvTable estimates_table(const EstimateResult& result) {
    CsvTable t;
    t.header = {"area_id", "n", "N", "gini", "c", "gamma", "gamma_clamped", "out_of_range", "floored_points"};
    for (const auto& a : result.areas)
        t.rows.push_back({std::to_string(a.area_id), count(a.n), count(a.big_n), num(a.gini), num(a.c), num(a.gamma),
                          flag(a.gamma_clamped), flag(a.out_of_range), count(a.floored_points)});
    return t;
}

CsvTable cdf_table(const EstimateResult& result) {
    CsvTable t;
    t.header = {"area_id", "support", "cumulative_probability"};
    for (const auto& a : result.areas) {
        if (!a.cdf) continue;
        const auto cum = a.cdf->cumulative();
        for (std::size_t i = 0; i < a.cdf->size(); ++i)
            t.rows.push_back({std::to_string(a.area_id), num(a.cdf->points()[i]), num(cum[i])});
    }
    return t;
}

CsvTable surface_table(const TuningResult& result) {
    CsvTable t;
    t.header = {"area_id", "c", "gamma", "original", "rrmse", "rrmse_sqrt", "bias", "chosen"};
    for (const auto& a : result.areas)
        for (std::size_t k = 0; k < a.cells.size(); ++k) {
            const auto& c = a.cells[k];
            t.rows.push_back({std::to_string(a.area_id), num(c.c), num(c.gamma), num(c.original), num(c.rrmse),
                              num(c.rrmse_sqrt()), num(c.bias), flag(!a.excluded && k == a.chosen)});
        }
    return t;
}

CsvTable chosen_table(const TuningResult& result) {
    CsvTable t;
    t.header = {"area_id", "c", "gamma", "rrmse", "excluded"};
    for (const auto& a : result.areas) {
        if (a.excluded) {
            t.rows.push_back({std::to_string(a.area_id), "NaN", "NaN", "NaN", "1"});
            continue;
        }
        const auto& c = a.cells[a.chosen];
        t.rows.push_back({std::to_string(a.area_id), num(c.c), num(c.gamma), num(c.rrmse), "0"});
    }
    return t;
}

CsvTable scenario_table(const ScenarioResult& result) {
    CsvTable t;
    t.header = {"scenario", "area", "true_gini", "method", "rel_bias", "rrmse"};
    for (std::size_t a = 0; a < result.area_ids.size(); ++a)
        for (std::size_t m = 0; m < result.methods.size(); ++m)
            t.rows.push_back({result.name, std::to_string(result.area_ids[a]), num(result.true_gini[a]),
                              to_string(result.methods[m]), num(result.summary[m].rel_bias[a]),
                              num(result.summary[m].rrmse[a])});
    return t;
}

CsvTable summary_table(const std::vector<ScenarioResult>& results) {
    CsvTable t;
    t.header = {"scenario", "median_true_gini", "method", "median_rel_bias", "median_rrmse", "failed_reps", "aborted",
                "floored"};
    for (const auto& r : results)
        for (std::size_t m = 0; m < r.methods.size(); ++m) {
            const auto& s = r.summary[m];
            t.rows.push_back({r.name, num(r.median_true_gini), to_string(r.methods[m]), num(s.median_rel_bias),
                              num(s.median_rrmse), std::to_string(s.failed_reps), flag(s.aborted), count(r.floored)});
        }
    return t;
}

std::string summary_text(const std::vector<ScenarioResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += fmt::format("scenario {}  median true Gini {:.3f}", r.name, r.median_true_gini);
        if (r.floored_flag) out += fmt::format("  ({} outcomes floored at 0)", r.floored);
        out += "\n";
        out += fmt::format("  {:<12} {:>10} {:>10} {:>7}\n", "method", "rel.bias", "RRMSE", "failed");
        for (std::size_t m = 0; m < r.methods.size(); ++m) {
            const auto& s = r.summary[m];
            if (s.aborted)
                out += fmt::format("  {:<12} {:>10} {:>10} {:>7}\n", to_string(r.methods[m]), "aborted", "", s.failed_reps);
            else
                out += fmt::format("  {:<12} {:>10.3f} {:>10.3f} {:>7}\n", to_string(r.methods[m]), s.median_rel_bias,
                                   s.median_rrmse, s.failed_reps);
        }
        out += "\n";
    }
    return out;
}

FittedModel fit_model(const SurveyData& data, ModelKind kind, double huber_c) {
    if (kind == ModelKind::MQuantile) {
        MQuantileOptions o;
        o.huber = HuberConfig{huber_c};
        return fit_mq(data, o);
    }
    ReblupOptions o;
    o.huber = HuberConfig{huber_c};
    return fit_reblup(data, o);
}

}  // namespace sae::io
