#include "sae/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sae/error.hpp"

namespace sae {

namespace {

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

std::size_t floor_vector(Vector& v) {
    std::size_t moved = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] < 0.0) {
            v[i] = 0.0;
            ++moved;
        }
    return moved;
}

// A perfect fit reproduces y only up to rounding (about 1e-14 for outcomes
// near 100). Such fitted values are set to y so residuals are exactly zero and
// the pseudo-values of y and yhat do not straddle a tie.
void snap_fitted(AreaPrediction& a) {
    if (a.response.size() == 0) return;
    const double tol = 1e-12 * std::max(a.response.cwiseAbs().maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < a.fitted.size(); ++i)
        if (std::abs(a.response[i] - a.fitted[i]) <= tol) a.fitted[i] = a.response[i];
}

double scale_or_zero(std::span<const double> residuals, ScaleKind kind) {
    if (std::all_of(residuals.begin(), residuals.end(), [](double e) { return e == 0.0; })) return 0.0;
    return robust_scale(residuals, kind).value;
}

TuningConstants constants_for(const EstimatorSpec& spec, int area_id) {
    if (auto it = spec.per_area.find(area_id); it != spec.per_area.end()) return it->second;
    return {spec.c, spec.gamma.value_or(1.0)};
}

bool area_has_fixed_gamma(const EstimatorSpec& spec, int area_id) {
    return spec.gamma.has_value() || spec.per_area.contains(area_id);
}

double cdf_gini(const AreaPrediction& a, Method method, double c, double gamma, double scale,
                std::span<const double> residuals, bool keep, AreaEstimate& est) {
    const auto obs = as_span(a.observed);
    const auto pred = as_span(a.predicted);
    WeightedCdf cdf;
    switch (method) {
        case Method::Plugin: cdf = cdf_naive(obs, pred); break;
        case Method::CD: cdf = cdf_cd(obs, pred, residuals); break;
        case Method::WR: cdf = cdf_wr(obs, pred, residuals, {c}, scale); break;
        case Method::BC: cdf = cdf_bc(obs, pred, residuals); break;
        case Method::SBC: cdf = cdf_sbc(obs, pred, residuals, {c}, scale); break;
        case Method::ABC: cdf = cdf_abc(obs, pred, residuals, {c, gamma}, scale); break;
        default: throw InputError("not a CDF-based method");
    }
    auto floored = floor_support(cdf, &est.floored_points);
    const double g = gini_from_cdf(floored);
    if (keep) est.cdf = std::move(floored);
    return g;
}

void finish(AreaEstimate& est, Method method) {
    est.out_of_range = is_if_method(method) && (est.gini < 0.0 || est.gini > 1.0);
}

}  // namespace

const AreaEstimate& EstimateResult::area(int id) const {
    auto it = std::find_if(areas.begin(), areas.end(), [id](const AreaEstimate& a) { return a.area_id == id; });
    if (it == areas.end()) throw InputError("no estimate for area " + std::to_string(id));
    return *it;
}

std::vector<AreaPrediction> area_predictions(const FittedModel& model, const SurveyData& data) {
    std::vector<AreaPrediction> out;
    out.reserve(data.areas.size());
    for (const auto& a : data.areas) out.push_back(make_area_prediction(model, a));
    return out;
}

WeightedCdf floor_support(const WeightedCdf& cdf, std::size_t* moved) {
    if (cdf.empty() || cdf.points().front() >= 0.0) return cdf;
    std::vector<WeightedCdf::Atom> atoms;
    atoms.reserve(cdf.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        const double t = cdf.points()[i];
        if (t < 0.0) ++count;
        atoms.push_back({std::max(t, 0.0), cdf.weights()[i]});
    }
    if (moved) *moved += count;
    return WeightedCdf::from_atoms(std::move(atoms));
}

EstimateResult estimate_gini(std::span<const AreaPrediction> input, const EstimatorSpec& spec,
                             std::span<const int> targets) {
    // Predictions feeding the Gini must be nonnegative.
    std::vector<AreaPrediction> areas(input.begin(), input.end());
    std::map<int, std::size_t> floored;
    for (auto& a : areas) {
        snap_fitted(a);
        floored[a.area_id] = floor_vector(a.predicted);
    }
    if (is_if_method(spec.method))
        for (auto& a : areas) floored[a.area_id] += floor_vector(a.observed);

    std::vector<int> wanted(targets.begin(), targets.end());
    if (wanted.empty())
        for (const auto& a : areas) wanted.push_back(a.area_id);
    auto find_area = [&](int id) -> const AreaPrediction& {
        auto it = std::find_if(areas.begin(), areas.end(), [id](const AreaPrediction& a) { return a.area_id == id; });
        if (it == areas.end()) throw InputError("unknown area id " + std::to_string(id));
        return *it;
    };
    for (int id : wanted)
        if (spec.scope == Scope::Partial && spec.method != Method::Plugin && find_area(id).sample_size() == 0)
            throw InputError("partial calibration is impossible for unsampled area " + std::to_string(id));

    EstimateResult result;
    const bool if_route = is_if_method(spec.method);
    const bool skewed = spec.method == Method::ABC || spec.method == Method::IfABC;

    // Pseudo-residuals (IF) or model residuals (CDF) for every sampled area.
    std::map<int, IfAreaTerms> terms;
    AreaResiduals calib_residuals;
    for (const auto& a : areas) {
        if (if_route) {
            auto t = if_area_terms(a, spec.reference);
            if (a.sample_size() > 0)
                calib_residuals[a.area_id] = Eigen::Map<const Vector>(t.pseudo_residuals.data(),
                                                                      static_cast<Eigen::Index>(t.pseudo_residuals.size()));
            terms.emplace(a.area_id, std::move(t));
        } else if (a.sample_size() > 0) {
            calib_residuals[a.area_id] = a.residuals();
        }
    }

    std::optional<GammaEstimate> gammas;
    if (skewed && !calib_residuals.empty() && !spec.gamma.has_value())
        gammas = estimate_gamma(calib_residuals, spec.gamma_options);

    if (spec.scope == Scope::Full && spec.method != Method::Plugin) {
        if (!(spec.method == Method::SBC || spec.method == Method::ABC || if_route))
            throw InputError("full calibration is defined for SBC/ABC and the IF estimators");
        const auto pooled = pool_residuals(calib_residuals);
        if (pooled.empty()) throw InputError("full calibration needs at least one sampled area");
        const double w = scale_or_zero(pooled, spec.scale_kind);
        double gamma = 1.0;
        bool clamped = false;
        if (skewed) {
            if (spec.gamma) {
                gamma = *spec.gamma;
            } else {
                gamma = gammas->pooled.gamma;
                clamped = gammas->pooled.clamped;
                result.pooled_gamma = gammas->pooled;
            }
        }
        const AsymHuberConfig psi{spec.c, gamma};
        for (int id : wanted) {
            const auto& a = find_area(id);
            AreaEstimate est{id, a.sample_size(), a.population_size(), 0.0, spec.c, gamma, clamped, false, floored[id], std::nullopt};
            if (if_route) {
                est.gini = if_calibrated_gini_full(terms.at(id), pooled, psi, w);
            } else {
                auto cdf = floor_support(cdf_full_abc(as_span(a.observed), as_span(a.predicted), pooled, psi, w),
                                         &est.floored_points);
                est.gini = gini_from_cdf(cdf);
                if (spec.keep_cdf) est.cdf = std::move(cdf);
            }
            finish(est, spec.method);
            result.areas.push_back(est);
        }
        return result;
    }

    for (int id : wanted) {
        const auto& a = find_area(id);
        auto k = constants_for(spec, id);
        AreaEstimate est{id, a.sample_size(), a.population_size(), 0.0, k.c, 1.0, false, false, floored[id], std::nullopt};
        if (skewed) {
            if (!area_has_fixed_gamma(spec, id)) {
                const auto& g = gammas->per_area.at(id);
                k.gamma = g.gamma;
                est.gamma_clamped = g.clamped;
            }
            est.gamma = k.gamma;
        }
        if (spec.method == Method::Plugin) {
            est.gini = cdf_gini(a, spec.method, k.c, 1.0, 0.0, {}, spec.keep_cdf, est);
        } else if (if_route) {
            const auto& t = terms.at(id);
            const double w = scale_or_zero(t.pseudo_residuals, spec.scale_kind);
            const double n = static_cast<double>(t.n);
            const double correction =
                (static_cast<double>(t.big_n) - n) / n * calibration_sum(t.pseudo_residuals, {k.c, est.gamma}, w);
            est.gini = -t.t_tilde - 2.0 + 2.0 / t.mu_tilde / static_cast<double>(t.big_n) * (t.sum_z + correction);
        } else {
            const Vector& e = calib_residuals.at(id);
            const auto res = as_span(e);
            const bool needs_scale = spec.method == Method::WR || spec.method == Method::SBC || spec.method == Method::ABC;
            const double w = needs_scale ? scale_or_zero(res, spec.scale_kind) : 0.0;
            est.gini = cdf_gini(a, spec.method, k.c, est.gamma, w, res, spec.keep_cdf, est);
        }
        finish(est, spec.method);
        result.areas.push_back(est);
    }
    return result;
}

EstimateResult estimate_gini(const FittedModel& model, const SurveyData& data, const EstimatorSpec& spec,
                             std::span<const int> targets) {
    const auto preds = area_predictions(model, data);
    return estimate_gini(preds, spec, targets);
}

bool is_if_method(Method method) { return method == Method::IfSBC || method == Method::IfABC; }

bool uses_gamma(Method method) { return method == Method::ABC || method == Method::IfABC; }

const char* to_string(Method method) {
    switch (method) {
        case Method::Plugin: return "plugin";
        case Method::CD: return "cd";
        case Method::WR: return "wr";
        case Method::BC: return "bc";
        case Method::SBC: return "sbc";
        case Method::ABC: return "abc";
        case Method::IfSBC: return "if-sbc";
        case Method::IfABC: return "if-abc";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    for (auto m : {Method::Plugin, Method::CD, Method::WR, Method::BC, Method::SBC, Method::ABC, Method::IfSBC,
                   Method::IfABC})
        if (text == to_string(m)) return m;
    throw InputError("unknown method '" + text + "'");
}

}  // namespace sae
