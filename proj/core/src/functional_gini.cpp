#include "sae/functional_gini.hpp"

#include <algorithm>
#include <numeric>

#include "sae/error.hpp"

namespace sae {

namespace {

std::vector<double> sorted_nonneg(std::span<const double> values) {
    if (values.empty()) throw InputError("empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    if (v.front() < 0.0) throw InputError("Gini requires nonnegative values");
    return v;
}

// sum_i i * y_(i) / N^2 on an ascending vector.
double rank_integral(const std::vector<double>& sorted) {
    const double n = static_cast<double>(sorted.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) acc += static_cast<double>(i + 1) * sorted[i];
    return acc / (n * n);
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> combined(const AreaPrediction& area) {
    std::vector<double> out(area.observed.data(), area.observed.data() + area.observed.size());
    out.insert(out.end(), area.predicted.data(), area.predicted.data() + area.predicted.size());
    return out;
}

std::vector<double> fitted_combined(const AreaPrediction& area) {
    std::vector<double> out(area.fitted.data(), area.fitted.data() + area.fitted.size());
    out.insert(out.end(), area.predicted.data(), area.predicted.data() + area.predicted.size());
    return out;
}

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

bool all_zero(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

double empirical_gini(std::span<const double> values) {
    const auto sorted = sorted_nonneg(values);
    const double mu = mean_of(sorted);
    if (!(mu > 0.0)) throw NumericalError("Gini requires a positive mean");
    return 2.0 * rank_integral(sorted) / mu - 1.0;
}

double gini_influence(double y, std::span<const double> values) {
    const auto cdf = WeightedCdf::equal_mass(values);
    if (cdf.points().front() < 0.0) throw InputError("Gini requires nonnegative values");
    const double mu = cdf.mean();
    if (!(mu > 0.0)) throw NumericalError("Gini requires a positive mean");
    double integral = 0.0;
    double mass = 0.0;
    double upper = 0.0;   // int_{t >= y} t dF
    double f_at_y = 0.0;  // F(y)
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        const double t = cdf.points()[i];
        const double w = cdf.weights()[i];
        mass += w;
        integral += t * w * mass;
        if (t >= y) upper += t * w;
        if (t <= y) f_at_y = mass;
    }
    return 2.0 / mu * (upper - integral) + 2.0 * y / mu * (f_at_y - integral / mu);
}

PseudoValues pseudo_values(std::span<const double> y_tilde) {
    PseudoValues pv;
    pv.sorted = sorted_nonneg(y_tilde);
    const auto n = pv.sorted.size();
    const double big_n = static_cast<double>(n);
    pv.z.resize(n);
    double tail = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        tail += pv.sorted[i];
        pv.z[i] = tail / big_n + static_cast<double>(i + 1) / big_n * pv.sorted[i];
    }
    pv.mu_tilde = mean_of(pv.sorted);
    if (!(pv.mu_tilde > 0.0)) throw NumericalError("pseudo-values need a positive mean");
    pv.t_tilde = 2.0 * rank_integral(pv.sorted) / pv.mu_tilde - 1.0;
    return pv;
}

PseudoValueFunction::PseudoValueFunction(std::span<const double> values) : sorted_(values.begin(), values.end()) {
    if (sorted_.empty()) throw InputError("empty sample");
    std::sort(sorted_.begin(), sorted_.end());
    tail_.assign(sorted_.size() + 1, 0.0);
    for (std::size_t i = sorted_.size(); i-- > 0;) tail_[i] = tail_[i + 1] + sorted_[i];
    mean_ = tail_[0] / static_cast<double>(sorted_.size());
}

double PseudoValueFunction::operator()(double y) const {
    const double n = static_cast<double>(sorted_.size());
    const auto first_ge = std::lower_bound(sorted_.begin(), sorted_.end(), y) - sorted_.begin();
    const auto count_le = std::upper_bound(sorted_.begin(), sorted_.end(), y) - sorted_.begin();
    return tail_[static_cast<std::size_t>(first_ge)] / n + y * static_cast<double>(count_le) / n;
}

IfAreaTerms if_area_terms(const AreaPrediction& area, PseudoReference reference) {
    IfAreaTerms terms;
    const auto y_tilde = combined(area);
    const auto pv = pseudo_values(y_tilde);
    terms.t_tilde = pv.t_tilde;
    terms.mu_tilde = pv.mu_tilde;
    terms.sum_z = std::accumulate(pv.z.begin(), pv.z.end(), 0.0);
    terms.n = area.sample_size();
    terms.big_n = area.population_size();
    if (terms.n == 0) return terms;

    const PseudoValueFunction z(y_tilde);
    std::optional<PseudoValueFunction> z_fitted;
    if (reference == PseudoReference::FittedVector) z_fitted.emplace(fitted_combined(area));
    const PseudoValueFunction& z_hat = z_fitted ? *z_fitted : z;
    terms.pseudo_residuals.reserve(terms.n);
    for (std::size_t i = 0; i < terms.n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        terms.pseudo_residuals.push_back(z(area.response[k]) - z_hat(area.fitted[k]));
    }
    return terms;
}

double calibration_sum(std::span<const double> pseudo_residuals, const AsymHuberConfig& psi, double scale) {
    psi.validate();
    if (all_zero(pseudo_residuals)) return 0.0;
    if (!(scale > 0.0)) throw ZeroScaleError("pseudo-residual scale is zero");
    double acc = 0.0;
    for (double r : pseudo_residuals) acc += scale * asym_huber_psi(r / scale, psi);
    return acc;
}

namespace {

double scale_or_zero(std::span<const double> residuals, ScaleKind kind) {
    if (all_zero(residuals)) return 0.0;
    return robust_scale(residuals, kind).value;
}

double linearized_value(const IfAreaTerms& t, double correction) {
    return -t.t_tilde - 2.0 + 2.0 / t.mu_tilde / static_cast<double>(t.big_n) * (t.sum_z + correction);
}

}  // namespace

double if_calibrated_gini(const AreaPrediction& area, const IfCalibration& cal) {
    if (area.sample_size() == 0)
        throw InputError("partial calibration is impossible for unsampled area " + std::to_string(area.area_id));
    const auto terms = if_area_terms(area, cal.reference);
    const double w = scale_or_zero(terms.pseudo_residuals, cal.scale_kind);
    const double n = static_cast<double>(terms.n);
    const double factor = (static_cast<double>(terms.big_n) - n) / n;
    const double correction = factor * calibration_sum(terms.pseudo_residuals, {cal.c, cal.gamma}, w);
    return linearized_value(terms, correction);
}

double if_calibrated_gini(const FittedModel& model, const SurveyData& data, int area_id, const IfCalibration& cal) {
    return if_calibrated_gini(make_area_prediction(model, data.area(area_id)), cal);
}

std::vector<double> pool_pseudo_residuals(const std::vector<IfAreaTerms>& terms) {
    std::vector<double> pooled;
    for (const auto& t : terms) pooled.insert(pooled.end(), t.pseudo_residuals.begin(), t.pseudo_residuals.end());
    return pooled;
}

double if_calibrated_gini_full(const IfAreaTerms& target, std::span<const double> pooled,
                               const AsymHuberConfig& psi, double pooled_scale) {
    if (pooled.empty()) throw InputError("full calibration needs pooled pseudo-residuals");
    const double factor = (static_cast<double>(target.big_n) - static_cast<double>(target.n)) /
                          static_cast<double>(pooled.size());
    return linearized_value(target, factor * calibration_sum(pooled, psi, pooled_scale));
}

double if_calibrated_gini_full(const FittedModel& model, const SurveyData& data, int area_id,
                               const IfCalibration& cal) {
    std::vector<IfAreaTerms> all;
    std::optional<IfAreaTerms> target;
    for (const auto& a : data.areas) {
        auto terms = if_area_terms(make_area_prediction(model, a), cal.reference);
        if (a.id == area_id) target = terms;
        all.push_back(std::move(terms));
    }
    if (!target) throw InputError("unknown area id " + std::to_string(area_id));
    const auto pooled = pool_pseudo_residuals(all);
    return if_calibrated_gini_full(*target, pooled, {cal.c, cal.gamma}, scale_or_zero(pooled, cal.scale_kind));
}

double MeanFunctional::value(std::span<const double> sample) const { return mean_of(sample); }

std::vector<double> MeanFunctional::influence_at_sample(std::span<const double> sample) const {
    return influence(sample, sample);
}

std::vector<double> MeanFunctional::influence(std::span<const double> points, std::span<const double> sample) const {
    const double mu = mean_of(sample);
    std::vector<double> out;
    out.reserve(points.size());
    for (double y : points) out.push_back(y - mu);
    return out;
}

double GiniFunctional::value(std::span<const double> sample) const { return empirical_gini(sample); }

std::vector<double> GiniFunctional::influence_at_sample(std::span<const double> sample) const {
    // Rank-based pseudo-values, mapped back to the input order.
    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sample[a] < sample[b]; });
    const auto pv = pseudo_values(sample);
    const double two_i = 2.0 * rank_integral(pv.sorted);
    std::vector<double> out(sample.size());
    for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = 2.0 / pv.mu_tilde * (pv.z[r] - two_i);
    return out;
}

std::vector<double> GiniFunctional::influence(std::span<const double> points, std::span<const double> sample) const {
    const PseudoValueFunction z(sample);
    const auto sorted = sorted_nonneg(sample);
    const double two_i = 2.0 * rank_integral(sorted);
    const double mu = z.mean();
    if (!(mu > 0.0)) throw NumericalError("Gini requires a positive mean");
    std::vector<double> out;
    out.reserve(points.size());
    for (double y : points) out.push_back(2.0 / mu * (z(y) - two_i));
    return out;
}

double linearized_calibrate(const LinearizableFunctional& functional, const AreaPrediction& area,
                            const AsymHuberConfig& psi, ScaleKind scale_kind) {
    if (area.sample_size() == 0)
        throw InputError("partial calibration is impossible for unsampled area " + std::to_string(area.area_id));
    const auto y_tilde = combined(area);
    const double value = functional.value(y_tilde);
    const auto if_sample = functional.influence_at_sample(y_tilde);
    const double if_sum = std::accumulate(if_sample.begin(), if_sample.end(), 0.0);
    const auto if_response = functional.influence(as_span(area.response), y_tilde);
    const auto if_fitted = functional.influence(as_span(area.fitted), y_tilde);
    std::vector<double> zeta(if_response.size());
    for (std::size_t i = 0; i < zeta.size(); ++i) zeta[i] = if_response[i] - if_fitted[i];
    const double n = static_cast<double>(area.sample_size());
    const double big_n = static_cast<double>(area.population_size());
    const double correction = (big_n - n) / n * calibration_sum(zeta, psi, scale_or_zero(zeta, scale_kind));
    return value + (if_sum + correction) / big_n;
}

}  // namespace sae
