#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sae/cdf_est.hpp"
#include "sae/functional_gini.hpp"
#include "sae/gamma.hpp"

namespace sae {

/// Area-level Gini estimators. Plugin is the uncalibrated robust plug-in
/// (observed outcomes plus point predictions); CD..ABC evaluate the Gini of
/// the corresponding CDF estimator; IfSBC/IfABC use the linearised route.
enum class Method { Plugin, CD, WR, BC, SBC, ABC, IfSBC, IfABC };

struct TuningConstants {
    double c = 3.0;
    double gamma = 1.0;
};

struct EstimatorSpec {
    Method method = Method::ABC;
    Scope scope = Scope::Partial;
    double c = 3.0;
    /// Fixed skewness; unset means estimate it from the (pseudo-)residuals.
    std::optional<double> gamma = 1.0;
    GammaOptions gamma_options{};
    ScaleKind scale_kind = ScaleKind::Qn;
    PseudoReference reference = PseudoReference::Combined;
    /// Area-specific (c, gamma) overriding c/gamma (Partial scope only).
    std::map<int, TuningConstants> per_area;
    /// Keep each area's (floored) CDF in the result; CDF-based methods only.
    bool keep_cdf = false;
};

struct AreaEstimate {
    int area_id = 0;
    std::size_t n = 0;
    std::size_t big_n = 0;
    double gini = 0.0;
    double c = 0.0;
    double gamma = 1.0;
    bool gamma_clamped = false;
    bool out_of_range = false;     // calibrated value outside [0, 1]; not clamped
    std::size_t floored_points = 0;  // negative support/predictions moved to 0
    std::optional<WeightedCdf> cdf;  // set when EstimatorSpec::keep_cdf
};

struct EstimateResult {
    std::vector<AreaEstimate> areas;
    std::optional<GammaValue> pooled_gamma;  // Full scope with estimated gamma

    const AreaEstimate& area(int id) const;
};

std::vector<AreaPrediction> area_predictions(const FittedModel& model, const SurveyData& data);

/// Estimate the Gini for `targets` (all areas when empty). Partial scope
/// throws InputError for a target without sampled units.
EstimateResult estimate_gini(std::span<const AreaPrediction> areas, const EstimatorSpec& spec,
                             std::span<const int> targets = {});
EstimateResult estimate_gini(const FittedModel& model, const SurveyData& data, const EstimatorSpec& spec,
                             std::span<const int> targets = {});

/// Moves the mass of negative support points to 0 (the Gini needs t >= 0).
WeightedCdf floor_support(const WeightedCdf& cdf, std::size_t* moved = nullptr);

bool is_if_method(Method method);
bool uses_gamma(Method method);
const char* to_string(Method method);
Method parse_method(const std::string& text);

}  // namespace sae
