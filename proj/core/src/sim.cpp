#include "sae/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sae/error.hpp"
#include "sae/parallel.hpp"
#include "sae/functional_gini.hpp"
#include "sae/robust_fit.hpp"

namespace sae {

void Scenario::validate() const {
    if (d < 1) throw InputError("scenario '" + name + "': d must be positive");
    if (n < 1 || big_n < 1 || n > big_n) throw InputError("scenario '" + name + "': need 1 <= n <= N");
    if (!(lambda > 0.0)) throw InputError("scenario '" + name + "': lambda must be positive");
    if (!(nu > 2.0)) throw InputError("scenario '" + name + "': nu must exceed 2");
    if (!(x_sdlog >= 0.0) || !(sigma_u >= 0.0) || !(error_scale >= 0.0))
        throw InputError("scenario '" + name + "': scales must be nonnegative");
    if (reps < 1) throw InputError("scenario '" + name + "': reps must be positive");
    if (methods.empty()) throw InputError("scenario '" + name + "': no methods");
    if (tuning == TuningMode::Bootstrap) bootstrap_grid.validate();
}

double skew_t_abs_mean(double nu) {
    if (!(nu > 1.0)) throw InputError("E|t| needs nu > 1");
    return 2.0 * std::sqrt(nu) * std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) /
           ((nu - 1.0) * std::sqrt(std::numbers::pi));
}

double skew_t_mean(double nu, double lambda) { return skew_t_abs_mean(nu) * (lambda - 1.0 / lambda); }

std::vector<double> skew_t_sample(double nu, double lambda, Rng& rng, std::size_t n, bool centered) {
    if (!(nu > 2.0)) throw InputError("skewed t needs nu > 2");
    if (!(lambda > 0.0)) throw InputError("skewed t needs lambda > 0");
    std::student_t_distribution<double> t(nu);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double p_right = lambda * lambda / (1.0 + lambda * lambda);
    const double shift = centered ? skew_t_mean(nu, lambda) : 0.0;
    std::vector<double> out(n);
    for (auto& v : out) {
        const bool right = unif(rng) < p_right;
        const double a = std::abs(t(rng));
        v = (right ? lambda * a : -a / lambda) - shift;
    }
    return out;
}

GeneratedPopulation gen_population(const Scenario& s, Rng& rng) {
    s.validate();
    GeneratedPopulation g;
    g.population.p = 2;
    std::lognormal_distribution<double> xlaw(s.x_meanlog, s.x_sdlog);
    std::normal_distribution<double> ulaw(0.0, 1.0);
    for (int j = 0; j < s.d; ++j) {
        PopulationArea area;
        area.id = j + 1;
        area.x.resize(s.big_n, 2);
        area.y.resize(s.big_n);
        const double u = s.sigma_u * ulaw(rng);
        for (int i = 0; i < s.big_n; ++i) {
            area.x(i, 0) = 1.0;
            area.x(i, 1) = xlaw(rng);
        }
        const auto eps = skew_t_sample(s.nu, s.lambda, rng, static_cast<std::size_t>(s.big_n), s.centered);
        for (int i = 0; i < s.big_n; ++i) {
            double y = s.beta0 + s.beta1 * area.x(i, 1) + u + s.error_scale * eps[static_cast<std::size_t>(i)];
            if (y < 0.0) {
                y = 0.0;
                ++g.floored;
            }
            area.y[i] = y;
        }
        g.true_gini.push_back(empirical_gini({area.y.data(), static_cast<std::size_t>(area.y.size())}));
        g.population.areas.push_back(std::move(area));
    }
    g.floored_flag = static_cast<double>(g.floored) > 1e-3 * s.d * s.big_n;
    return g;
}

std::vector<std::size_t> srswor(std::size_t big_n, std::size_t n, Rng& rng) {
    if (n > big_n) throw InputError("sample size exceeds the area size");
    // Selection sampling (Knuth's algorithm S): one uniform per unit scanned.
    std::vector<std::size_t> out;
    out.reserve(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < big_n && out.size() < n; ++i) {
        const double need = static_cast<double>(n - out.size());
        const double left = static_cast<double>(big_n - i);
        if (left * unif(rng) < need) out.push_back(i);
    }
    return out;
}

std::vector<std::vector<std::size_t>> srswor(const Population& population, std::size_t n, Rng& rng) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(population.areas.size());
    for (const auto& a : population.areas) out.push_back(srswor(static_cast<std::size_t>(a.x.rows()), n, rng));
    return out;
}

SurveyData make_survey(const Population& population, const std::vector<std::vector<std::size_t>>& sample) {
    if (sample.size() != population.areas.size()) throw InputError("sample does not match the population areas");
    SurveyData data;
    data.p = population.p;
    for (std::size_t j = 0; j < sample.size(); ++j) {
        const auto& pa = population.areas[j];
        const auto& idx = sample[j];
        const Eigen::Index big_n = pa.x.rows();
        AreaData a;
        a.id = pa.id;
        a.x_sampled.resize(static_cast<Eigen::Index>(idx.size()), pa.x.cols());
        a.y_sampled.resize(static_cast<Eigen::Index>(idx.size()));
        a.x_unsampled.resize(big_n - static_cast<Eigen::Index>(idx.size()), pa.x.cols());
        std::size_t k = 0;
        Eigen::Index s = 0, r = 0;
        for (Eigen::Index i = 0; i < big_n; ++i) {
            if (k < idx.size() && idx[k] == static_cast<std::size_t>(i)) {
                a.x_sampled.row(s) = pa.x.row(i);
                a.y_sampled[s++] = pa.y[i];
                ++k;
            } else {
                a.x_unsampled.row(r++) = pa.x.row(i);
            }
        }
        data.areas.push_back(std::move(a));
    }
    return data;
}

const MethodSummary& ScenarioResult::of(SimMethod method) const {
    for (std::size_t m = 0; m < methods.size(); ++m)
        if (methods[m] == method) return summary[m];
    throw InputError(std::string("method not in result: ") + to_string(method));
}

namespace {

bool needs(const std::vector<SimMethod>& ms, std::initializer_list<SimMethod> any) {
    return std::any_of(ms.begin(), ms.end(),
                       [&](SimMethod m) { return std::find(any.begin(), any.end(), m) != any.end(); });
}

EstimatorSpec spec_for(const Scenario& s, SimMethod m) {
    EstimatorSpec spec;
    spec.scope = Scope::Partial;
    spec.scale_kind = s.scale_kind;
    spec.reference = s.reference;
    spec.gamma_options = s.gamma_options;
    spec.gamma = 1.0;
    switch (m) {
        case SimMethod::Eblup:
        case SimMethod::Reblup: spec.method = Method::Plugin; break;
        case SimMethod::ReblupSbc:
        case SimMethod::MqSbc: spec.method = Method::SBC; spec.c = s.c_reblup; break;
        case SimMethod::ReblupAbc:
        case SimMethod::MqAbc: spec.method = Method::ABC; spec.c = s.c_reblup; spec.gamma.reset(); break;
        case SimMethod::IfSbc: spec.method = Method::IfSBC; spec.c = s.c_if; break;
        case SimMethod::IfAbc: spec.method = Method::IfABC; spec.c = s.c_if; spec.gamma.reset(); break;
    }
    return spec;
}

ReblupOptions reblup_options(double c) {
    ReblupOptions o;
    o.huber = HuberConfig{c};
    return o;
}

double median_of(std::vector<double> v) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return median(std::move(v));
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, unsigned threads) {
    s.validate();
    Rng pop_rng(split_seed(s.seed, 0));
    const auto gen = gen_population(s, pop_rng);

    ScenarioResult out;
    out.name = s.name;
    out.true_gini = gen.true_gini;
    out.median_true_gini = median_of(gen.true_gini);
    out.floored = gen.floored;
    out.floored_flag = gen.floored_flag;
    out.methods = s.methods;
    for (const auto& a : gen.population.areas) out.area_ids.push_back(a.id);

    const std::size_t n_methods = s.methods.size();
    const std::size_t n_areas = out.area_ids.size();
    const std::size_t reps = static_cast<std::size_t>(s.reps);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.estimates.assign(n_methods, std::vector<std::vector<double>>(reps, std::vector<double>(n_areas, nan)));

    const bool want_eblup = needs(s.methods, {SimMethod::Eblup});
    const bool want_reblup = needs(s.methods, {SimMethod::Reblup, SimMethod::ReblupSbc, SimMethod::ReblupAbc,
                                               SimMethod::IfSbc, SimMethod::IfAbc});
    const bool want_mq = needs(s.methods, {SimMethod::MqSbc, SimMethod::MqAbc});

    parallel_for(reps, threads, [&](std::size_t h) {
        Rng rng(split_seed(s.seed, h + 1));
        const auto sample = srswor(gen.population, static_cast<std::size_t>(s.n), rng);
        const SurveyData data = make_survey(gen.population, sample);
        const std::uint64_t tune_seed = split_seed(s.seed ^ 0x5bd1e995ULL, h + 1);

        std::optional<FittedModel> eblup, reblup, mq;
        try {
            if (want_eblup) eblup = fit_reblup(data, reblup_options(1e6));
        } catch (const NumericalError&) {
        }
        try {
            if (want_reblup) reblup = fit_reblup(data, reblup_options(s.huber_c));
        } catch (const NumericalError&) {
        }
        try {
            if (want_mq) {
                MQuantileOptions o;
                o.huber = HuberConfig{s.huber_c};
                mq = fit_mq(data, o);
            }
        } catch (const NumericalError&) {
        }

        for (std::size_t m = 0; m < n_methods; ++m) {
            const SimMethod method = s.methods[m];
            const std::optional<FittedModel>& model =
                method == SimMethod::Eblup ? eblup
                : (method == SimMethod::MqSbc || method == SimMethod::MqAbc) ? mq
                                                                              : reblup;
            if (!model) continue;
            try {
                EstimatorSpec spec = spec_for(s, method);
                if (s.tuning == TuningMode::Bootstrap && spec.method != Method::Plugin) {
                    TuneOptions topt;
                    topt.threads = 1;
                    topt.reblup.huber = HuberConfig{s.huber_c};
                    topt.mq.huber = HuberConfig{s.huber_c};
                    TuningGrid grid = s.bootstrap_grid;
                    if (!uses_gamma(spec.method)) {
                        // Symmetric methods only tune c.
                        std::vector<std::pair<double, double>> cells;
                        for (const auto& [c, g] : grid.cells)
                            if (std::find(cells.begin(), cells.end(), std::make_pair(c, 1.0)) == cells.end())
                                cells.emplace_back(c, 1.0);
                        grid.cells = std::move(cells);
                    }
                    spec.per_area = bootstrap_tune(data, *model, grid, spec, tune_seed, topt).chosen();
                }
                const auto est = estimate_gini(*model, data, spec);
                for (std::size_t a = 0; a < n_areas; ++a) out.estimates[m][h][a] = est.areas[a].gini;
            } catch (const NumericalError&) {
            }
        }
    });

    for (std::size_t m = 0; m < n_methods; ++m) {
        MethodSummary sum;
        for (std::size_t h = 0; h < reps; ++h)
            if (std::any_of(out.estimates[m][h].begin(), out.estimates[m][h].end(),
                            [](double x) { return std::isnan(x); }))
                ++sum.failed_reps;
        sum.aborted = sum.failed_reps > 0.1 * static_cast<double>(reps);
        sum.rel_bias.assign(n_areas, nan);
        sum.rrmse.assign(n_areas, nan);
        if (!sum.aborted) {
            for (std::size_t a = 0; a < n_areas; ++a) {
                const double truth = out.true_gini[a];
                double total = 0.0, total_sq = 0.0;
                int used = 0;
                for (std::size_t h = 0; h < reps; ++h) {
                    const double g = out.estimates[m][h][a];
                    if (std::isnan(g)) continue;
                    const double rel = (g - truth) / truth;
                    total += rel;
                    total_sq += rel * rel;
                    ++used;
                }
                if (used == 0) continue;
                sum.rel_bias[a] = total / used;
                sum.rrmse[a] = std::sqrt(total_sq / used);
            }
        }
        sum.median_rel_bias = median_of(sum.rel_bias);
        sum.median_rrmse = median_of(sum.rrmse);
        out.summary.push_back(std::move(sum));
    }
    return out;
}

std::vector<Scenario> reference_scenarios(int reps, std::uint64_t seed) {
    struct Row {
        const char* name;
        double lambda;
        bool centered;
    };
    const Row rows[] = {{"1a", 40, true}, {"1b", 70, true}, {"1c", 100, true},
                        {"2a", 70, false}, {"2b", 150, false}, {"2c", 400, false}};
    std::vector<Scenario> out;
    std::uint64_t k = 0;
    for (const auto& r : rows) {
        Scenario s;
        s.name = r.name;
        s.lambda = r.lambda;
        s.centered = r.centered;
        s.reps = reps;
        s.seed = split_seed(seed, k++);
        s.methods = {SimMethod::Reblup, SimMethod::ReblupSbc, SimMethod::ReblupAbc, SimMethod::MqSbc,
                     SimMethod::MqAbc,  SimMethod::IfSbc,     SimMethod::IfAbc};
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SimMethod> all_sim_methods() {
    return {SimMethod::Eblup, SimMethod::Reblup, SimMethod::ReblupSbc, SimMethod::ReblupAbc,
            SimMethod::MqSbc, SimMethod::MqAbc,  SimMethod::IfSbc,     SimMethod::IfAbc};
}

const char* to_string(SimMethod method) {
    switch (method) {
        case SimMethod::Eblup: return "EBLUP";
        case SimMethod::Reblup: return "REBLUP";
        case SimMethod::ReblupSbc: return "REBLUP-SBC";
        case SimMethod::ReblupAbc: return "REBLUP-ABC";
        case SimMethod::MqSbc: return "MQ-SBC";
        case SimMethod::MqAbc: return "MQ-ABC";
        case SimMethod::IfSbc: return "IF-SBC";
        case SimMethod::IfAbc: return "IF-ABC";
    }
    return "?";
}

SimMethod parse_sim_method(const std::string& text) {
    for (auto m : all_sim_methods())
        if (text == to_string(m)) return m;
    throw InputError("unknown simulation method '" + text + "'");
}

const char* to_string(TuningMode mode) { return mode == TuningMode::Heuristic ? "heuristic" : "bootstrap"; }

TuningMode parse_tuning_mode(const std::string& text) {
    if (text == "heuristic") return TuningMode::Heuristic;
    if (text == "bootstrap") return TuningMode::Bootstrap;
    throw InputError("unknown tuning mode '" + text + "'");
}

}  // namespace sae
