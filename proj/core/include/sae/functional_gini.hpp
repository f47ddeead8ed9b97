#pragma once

#include <memory>
#include <span>
#include <vector>

#include "sae/cdf_est.hpp"
#include "sae/psi.hpp"

namespace sae {

/// Gini of a raw sample with F(y_(i)) = i/N on the ascending sort.
double empirical_gini(std::span<const double> values);

/// Influence function of the Gini at the empirical distribution of `values`:
/// 2/mu [ int_{t>=y} t dF - I ] + 2 y/mu [ F(y) - I/mu ].
double gini_influence(double y, std::span<const double> values);

/// Pseudo-values z_(i) = (1/N) sum_{h>=i} y_(h) + (i/N) y_(i) on the ascending
/// sort of the combined outcome vector, with its mean and plug-in Gini.
struct PseudoValues {
    std::vector<double> sorted;  // ascending combined vector
    std::vector<double> z;       // aligned with `sorted`
    double mu_tilde = 0.0;
    double t_tilde = 0.0;
};

PseudoValues pseudo_values(std::span<const double> y_tilde);

/// Point evaluation of z(y) = int_{t>=y} t dF + y F(y) against a fixed sample.
/// Agrees with pseudo_values() at sample points without ties.
class PseudoValueFunction {
public:
    explicit PseudoValueFunction(std::span<const double> values);
    double operator()(double y) const;
    double mean() const { return mean_; }
    std::size_t size() const { return sorted_.size(); }

private:
    std::vector<double> sorted_;
    std::vector<double> tail_;  // tail_[i] = sum_{h>=i} sorted_[h]
    double mean_ = 0.0;
};

/// Distribution against which fitted values of sampled units are turned into
/// pseudo-values. Combined: the observed-plus-predicted vector that also
/// yields z_ij. FittedVector: the vector of fitted values plus predictions.
enum class PseudoReference { Combined, FittedVector };

struct IfCalibration {
    double c = 2.0;
    double gamma = 1.0;
    ScaleKind scale_kind = ScaleKind::Qn;
    PseudoReference reference = PseudoReference::Combined;
};

/// Per-area ingredients of the linearised estimator.
struct IfAreaTerms {
    double t_tilde = 0.0;
    double mu_tilde = 0.0;
    double sum_z = 0.0;              // sum of pseudo-values over the combined vector
    std::vector<double> pseudo_residuals;  // z_ij - zhat_ij, i in s_j
    std::size_t n = 0;
    std::size_t big_n = 0;
};

IfAreaTerms if_area_terms(const AreaPrediction& area, PseudoReference reference);

/// Bounded calibration sum  sum_i w psi((zeta_i)/w).
double calibration_sum(std::span<const double> pseudo_residuals, const AsymHuberConfig& psi, double scale);

/// IF-ABC (IF-SBC when gamma = 1) for one area with its own pseudo-residuals.
double if_calibrated_gini(const AreaPrediction& area, const IfCalibration& cal);
double if_calibrated_gini(const FittedModel& model, const SurveyData& data, int area_id, const IfCalibration& cal);

/// Pooled (full) calibration: pseudo-residuals of all sampled areas with one
/// shared scale and (c, gamma). `pooled` comes from pool_pseudo_residuals().
double if_calibrated_gini_full(const IfAreaTerms& target, std::span<const double> pooled,
                               const AsymHuberConfig& psi, double pooled_scale);
double if_calibrated_gini_full(const FittedModel& model, const SurveyData& data, int area_id,
                               const IfCalibration& cal);
std::vector<double> pool_pseudo_residuals(const std::vector<IfAreaTerms>& terms);

/// A functional that can be linearised: its value and influence function at
/// the empirical distribution of a sample.
class LinearizableFunctional {
public:
    virtual ~LinearizableFunctional() = default;
    virtual double value(std::span<const double> sample) const = 0;
    /// Influence of each sample element (same order as `sample`).
    virtual std::vector<double> influence_at_sample(std::span<const double> sample) const = 0;
    /// Influence of arbitrary points.
    virtual std::vector<double> influence(std::span<const double> points, std::span<const double> sample) const = 0;
};

/// Mean: IF(y) = y - mu.
class MeanFunctional final : public LinearizableFunctional {
public:
    double value(std::span<const double> sample) const override;
    std::vector<double> influence_at_sample(std::span<const double> sample) const override;
    std::vector<double> influence(std::span<const double> points, std::span<const double> sample) const override;
};

/// Gini in its linear-in-z form: IF(y) = (2/mu) (z(y) - 2 I), the form whose
/// sample average vanishes exactly.
class GiniFunctional final : public LinearizableFunctional {
public:
    double value(std::span<const double> sample) const override;
    std::vector<double> influence_at_sample(std::span<const double> sample) const override;
    std::vector<double> influence(std::span<const double> points, std::span<const double> sample) const override;
};

/// Generic calibrated linearisation
///   T(Ytilde) + (1/N)[ sum IF + (N-n)/n sum w psi((IF(y_i) - IF(yhat_i))/w) ]
/// with all influences taken at the combined observed-plus-predicted sample.
double linearized_calibrate(const LinearizableFunctional& functional, const AreaPrediction& area,
                            const AsymHuberConfig& psi, ScaleKind scale_kind);

}  // namespace sae
