#include "sae/cdf_est.hpp"

#include <algorithm>
#include <string>

#include "sae/error.hpp"

namespace sae {

namespace {

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

using Atom = WeightedCdf::Atom;

void add_observed(std::vector<Atom>& atoms, std::span<const double> observed, double weight) {
    for (double y : observed) atoms.push_back({y, weight});
}

// Grid of predictions shifted by every residual contribution.
void add_grid(std::vector<Atom>& atoms, std::span<const double> predicted, std::span<const double> shifts,
              double weight) {
    for (double yhat : predicted)
        for (double s : shifts) atoms.push_back({yhat + s, weight});
}

template <class Psi>
std::vector<double> bounded_shifts(std::span<const double> residuals, double scale, Psi psi) {
    std::vector<double> out;
    if (std::all_of(residuals.begin(), residuals.end(), [](double e) { return e == 0.0; })) {
        out.assign(residuals.size(), 0.0);
        return out;
    }
    if (!(scale > 0.0)) throw ZeroScaleError("calibration scale must be positive");
    out.reserve(residuals.size());
    for (double e : residuals) out.push_back(scale * psi(e / scale));
    return out;
}

WeightedCdf grid_cdf(std::span<const double> observed, std::span<const double> predicted,
                     std::span<const double> shifts, double observed_weight, double grid_weight) {
    std::vector<Atom> atoms;
    atoms.reserve(observed.size() + predicted.size() * shifts.size());
    add_observed(atoms, observed, observed_weight);
    add_grid(atoms, predicted, shifts, grid_weight);
    return WeightedCdf::from_atoms(std::move(atoms));
}

// Residual-grid estimators with 1/N_j for observed units and 1/(N_j n_j) per cell.
WeightedCdf cd_family(std::span<const double> observed, std::span<const double> predicted,
                      std::span<const double> shifts) {
    const double n = static_cast<double>(observed.size());
    const double big_n = n + static_cast<double>(predicted.size());
    if (shifts.empty()) throw InputError("calibration needs at least one residual");
    return grid_cdf(observed, predicted, shifts, 1.0 / big_n, 1.0 / (big_n * n));
}

// Predictive-distribution estimators: every indicator carries 1/(n_j (N_j - n_j + 1)).
WeightedCdf bc_family(std::span<const double> observed, std::span<const double> predicted,
                      std::span<const double> shifts) {
    if (shifts.empty()) throw InputError("calibration needs at least one residual");
    const double n = static_cast<double>(observed.size());
    const double w = 1.0 / (n * (static_cast<double>(predicted.size()) + 1.0));
    return grid_cdf(observed, predicted, shifts, w, w);
}

const Vector& area_residuals(const AreaResiduals& residuals, int area_id) {
    auto it = residuals.find(area_id);
    if (it == residuals.end() || it->second.size() == 0)
        throw InputError("no residuals for area " + std::to_string(area_id));
    return it->second;
}

double scale_or_zero(std::span<const double> residuals, ScaleKind kind) {
    if (std::all_of(residuals.begin(), residuals.end(), [](double e) { return e == 0.0; })) return 0.0;
    return robust_scale(residuals, kind).value;
}

struct AreaInputs {
    Vector observed;
    Vector predicted;
};

AreaInputs area_inputs(const FittedModel& model, const SurveyData& data, int area_id) {
    const AreaData& area = data.area(area_id);
    return {area.y_sampled, predict_unsampled(model, area)};
}

}  // namespace

double CalibrationSpec::c_for(int area_id) const {
    if (auto it = c.find(area_id); it != c.end()) return it->second;
    if (default_c) return *default_c;
    throw InputError("no tuning constant c for area " + std::to_string(area_id));
}

double CalibrationSpec::gamma_for(int area_id) const {
    if (method != CdfMethod::ABC) return 1.0;
    if (auto it = gamma.find(area_id); it != gamma.end()) return it->second;
    if (default_gamma) return *default_gamma;
    throw InputError("no skewness gamma for area " + std::to_string(area_id));
}

AreaPrediction make_area_prediction(const FittedModel& model, const AreaData& area) {
    AreaPrediction p;
    p.area_id = area.id;
    p.observed = area.y_sampled;
    p.response = area.y_sampled;
    p.fitted = fitted_values(model, area);
    p.predicted = predict_unsampled(model, area);
    return p;
}

WeightedCdf cdf_naive(std::span<const double> observed, std::span<const double> predicted) {
    const std::size_t big_n = observed.size() + predicted.size();
    if (big_n == 0) throw InputError("area has no units");
    const double w = 1.0 / static_cast<double>(big_n);
    std::vector<Atom> atoms;
    atoms.reserve(big_n);
    add_observed(atoms, observed, w);
    add_observed(atoms, predicted, w);
    return WeightedCdf::from_atoms(std::move(atoms));
}

WeightedCdf cdf_cd(std::span<const double> observed, std::span<const double> predicted,
                   std::span<const double> residuals) {
    return cd_family(observed, predicted, residuals);
}

WeightedCdf cdf_wr(std::span<const double> observed, std::span<const double> predicted,
                   std::span<const double> residuals, const HuberConfig& huber, double scale) {
    huber.validate();
    auto shifts = bounded_shifts(residuals, scale, [&](double r) { return huber_psi(r, huber); });
    return cd_family(observed, predicted, shifts);
}

WeightedCdf cdf_bc(std::span<const double> observed, std::span<const double> predicted,
                   std::span<const double> residuals) {
    return bc_family(observed, predicted, residuals);
}

WeightedCdf cdf_sbc(std::span<const double> observed, std::span<const double> predicted,
                    std::span<const double> residuals, const HuberConfig& huber, double scale) {
    huber.validate();
    auto shifts = bounded_shifts(residuals, scale, [&](double r) { return huber_psi(r, huber); });
    return bc_family(observed, predicted, shifts);
}

WeightedCdf cdf_abc(std::span<const double> observed, std::span<const double> predicted,
                    std::span<const double> residuals, const AsymHuberConfig& psi, double scale) {
    psi.validate();
    auto shifts = bounded_shifts(residuals, scale, [&](double r) { return asym_huber_psi(r, psi); });
    return bc_family(observed, predicted, shifts);
}

WeightedCdf cdf_full_abc(std::span<const double> observed, std::span<const double> predicted,
                         std::span<const double> pooled_residuals, const AsymHuberConfig& psi,
                         double pooled_scale) {
    psi.validate();
    if (pooled_residuals.empty()) throw InputError("full calibration needs pooled residuals");
    if (observed.size() + predicted.size() == 0) throw InputError("area has no units");
    auto shifts = bounded_shifts(pooled_residuals, pooled_scale, [&](double r) { return asym_huber_psi(r, psi); });
    const double nj = static_cast<double>(observed.size());
    const double pooled_n = static_cast<double>(pooled_residuals.size());
    const double w = 1.0 / (nj + pooled_n * static_cast<double>(predicted.size()));
    return grid_cdf(observed, predicted, shifts, w, w);
}

WeightedCdf cdf_naive(const FittedModel& model, const SurveyData& data, int area_id) {
    const auto in = area_inputs(model, data, area_id);
    return cdf_naive(as_span(in.observed), as_span(in.predicted));
}

WeightedCdf cdf_cd(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data,
                   int area_id) {
    const auto in = area_inputs(model, data, area_id);
    return cdf_cd(as_span(in.observed), as_span(in.predicted), as_span(area_residuals(residuals, area_id)));
}

WeightedCdf cdf_wr(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id,
                   const CalibrationSpec& spec) {
    const auto in = area_inputs(model, data, area_id);
    const auto e = as_span(area_residuals(residuals, area_id));
    return cdf_wr(as_span(in.observed), as_span(in.predicted), e, {spec.c_for(area_id)},
                  scale_or_zero(e, spec.scale_kind));
}

WeightedCdf cdf_bc(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data,
                   int area_id) {
    const auto in = area_inputs(model, data, area_id);
    return cdf_bc(as_span(in.observed), as_span(in.predicted), as_span(area_residuals(residuals, area_id)));
}

WeightedCdf cdf_sbc(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id,
                    const CalibrationSpec& spec) {
    const auto in = area_inputs(model, data, area_id);
    const auto e = as_span(area_residuals(residuals, area_id));
    return cdf_sbc(as_span(in.observed), as_span(in.predicted), e, {spec.c_for(area_id)},
                   scale_or_zero(e, spec.scale_kind));
}

WeightedCdf cdf_abc(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id,
                    const CalibrationSpec& spec) {
    const auto in = area_inputs(model, data, area_id);
    const auto e = as_span(area_residuals(residuals, area_id));
    return cdf_abc(as_span(in.observed), as_span(in.predicted), e, {spec.c_for(area_id), spec.gamma_for(area_id)},
                   scale_or_zero(e, spec.scale_kind));
}

std::vector<double> pool_residuals(const AreaResiduals& residuals) {
    std::vector<double> pooled;
    for (const auto& [id, e] : residuals) pooled.insert(pooled.end(), e.data(), e.data() + e.size());
    return pooled;
}

WeightedCdf cdf_full_abc(const FittedModel& model, const AreaResiduals& all_residuals, const SurveyData& data,
                         int area_id, const CalibrationSpec& spec) {
    const auto in = area_inputs(model, data, area_id);
    const auto pooled = pool_residuals(all_residuals);
    if (pooled.empty()) throw InputError("full calibration needs pooled residuals");
    if (!spec.default_c) throw InputError("full calibration needs a shared constant c");
    const double gamma = spec.method == CdfMethod::ABC ? spec.default_gamma.value_or(1.0) : 1.0;
    return cdf_full_abc(as_span(in.observed), as_span(in.predicted), pooled, {*spec.default_c, gamma},
                        scale_or_zero(pooled, spec.scale_kind));
}

WeightedCdf calibrated_cdf(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data,
                           int area_id, const CalibrationSpec& spec) {
    if (spec.method == CdfMethod::Naive) return cdf_naive(model, data, area_id);
    if (spec.scope == Scope::Full) {
        if (spec.method != CdfMethod::SBC && spec.method != CdfMethod::ABC)
            throw InputError("full calibration is defined for the SBC and ABC estimators");
        return cdf_full_abc(model, residuals, data, area_id, spec);
    }
    if (!data.area(area_id).is_sampled())
        throw InputError("partial calibration is impossible for unsampled area " + std::to_string(area_id));
    switch (spec.method) {
        case CdfMethod::CD: return cdf_cd(model, residuals, data, area_id);
        case CdfMethod::WR: return cdf_wr(model, residuals, data, area_id, spec);
        case CdfMethod::BC: return cdf_bc(model, residuals, data, area_id);
        case CdfMethod::SBC: return cdf_sbc(model, residuals, data, area_id, spec);
        case CdfMethod::ABC: return cdf_abc(model, residuals, data, area_id, spec);
        case CdfMethod::Naive: break;
    }
    return cdf_naive(model, data, area_id);
}

const char* to_string(CdfMethod method) {
    switch (method) {
        case CdfMethod::Naive: return "naive";
        case CdfMethod::CD: return "cd";
        case CdfMethod::WR: return "wr";
        case CdfMethod::BC: return "bc";
        case CdfMethod::SBC: return "sbc";
        case CdfMethod::ABC: return "abc";
    }
    return "?";
}

const char* to_string(Scope scope) { return scope == Scope::Partial ? "partial" : "full"; }

Scope parse_scope(const std::string& text) {
    if (text == "partial") return Scope::Partial;
    if (text == "full") return Scope::Full;
    throw InputError("unknown scope '" + text + "' (expected partial or full)");
}

}  // namespace sae
