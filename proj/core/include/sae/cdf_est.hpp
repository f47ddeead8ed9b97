#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "sae/psi.hpp"
#include "sae/robust_fit.hpp"
#include "sae/weighted_cdf.hpp"

namespace sae {

enum class CdfMethod { Naive, CD, WR, BC, SBC, ABC };
enum class Scope { Partial, Full };

/// Which calibrated CDF to build and with which tuning constants.
/// Area-specific constants take precedence; the defaults apply to areas
/// missing from the maps and are the shared constants under Full scope.
struct CalibrationSpec {
    CdfMethod method = CdfMethod::ABC;
    std::map<int, double> c;
    std::map<int, double> gamma;
    std::optional<double> default_c;
    std::optional<double> default_gamma;
    ScaleKind scale_kind = ScaleKind::Qn;
    Scope scope = Scope::Partial;

    double c_for(int area_id) const;
    double gamma_for(int area_id) const;
};

/// Everything the area-level estimators need about one area. `observed` are
/// the sampled outcomes entering the population part of the distribution;
/// residuals are `response - fitted`. Outside the bootstrap response and
/// observed coincide.
struct AreaPrediction {
    int area_id = 0;
    Vector observed;
    Vector response;
    Vector fitted;
    Vector predicted;

    std::size_t sample_size() const { return static_cast<std::size_t>(observed.size()); }
    std::size_t population_size() const { return sample_size() + static_cast<std::size_t>(predicted.size()); }
    Vector residuals() const { return response - fitted; }
};

AreaPrediction make_area_prediction(const FittedModel& model, const AreaData& area);

// Building blocks on plain vectors. Residual contributions are
// scale * psi(residual / scale).

WeightedCdf cdf_naive(std::span<const double> observed, std::span<const double> predicted);
WeightedCdf cdf_cd(std::span<const double> observed, std::span<const double> predicted,
                   std::span<const double> residuals);
WeightedCdf cdf_wr(std::span<const double> observed, std::span<const double> predicted,
                   std::span<const double> residuals, const HuberConfig& huber, double scale);
WeightedCdf cdf_bc(std::span<const double> observed, std::span<const double> predicted,
                   std::span<const double> residuals);
WeightedCdf cdf_sbc(std::span<const double> observed, std::span<const double> predicted,
                    std::span<const double> residuals, const HuberConfig& huber, double scale);
WeightedCdf cdf_abc(std::span<const double> observed, std::span<const double> predicted,
                    std::span<const double> residuals, const AsymHuberConfig& psi, double scale);
/// Pooled-residual calibration: residuals of all sampled areas, one shared
/// (c, gamma, scale). Valid for areas without sampled units.
WeightedCdf cdf_full_abc(std::span<const double> observed, std::span<const double> predicted,
                         std::span<const double> pooled_residuals, const AsymHuberConfig& psi,
                         double pooled_scale);

// Model-level entry points.

WeightedCdf cdf_naive(const FittedModel& model, const SurveyData& data, int area_id);
WeightedCdf cdf_cd(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id);
WeightedCdf cdf_wr(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id,
                   const CalibrationSpec& spec);
WeightedCdf cdf_bc(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id);
WeightedCdf cdf_sbc(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id,
                    const CalibrationSpec& spec);
WeightedCdf cdf_abc(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data, int area_id,
                    const CalibrationSpec& spec);
WeightedCdf cdf_full_abc(const FittedModel& model, const AreaResiduals& all_residuals, const SurveyData& data,
                         int area_id, const CalibrationSpec& spec);

/// Dispatches on spec.method and spec.scope.
WeightedCdf calibrated_cdf(const FittedModel& model, const AreaResiduals& residuals, const SurveyData& data,
                           int area_id, const CalibrationSpec& spec);

/// Concatenation of all areas' residuals in ascending area order.
std::vector<double> pool_residuals(const AreaResiduals& residuals);

const char* to_string(CdfMethod method);
const char* to_string(Scope scope);
Scope parse_scope(const std::string& text);

}  // namespace sae
