#include "sae/psi.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "sae/error.hpp"

namespace sae {

void HuberConfig::validate() const {
    if (!(c > 0.0)) throw InputError("Huber constant c must be positive");
}

void AsymHuberConfig::validate() const {
    if (!(c > 0.0)) throw InputError("Huber constant c must be positive");
    if (!(gamma > 0.0)) throw InputError("skewness gamma must be positive");
}

double huber_psi(double r, const HuberConfig& cfg) {
    return std::clamp(r, -cfg.c, cfg.c);
}

double asym_huber_psi(double r, const AsymHuberConfig& cfg) {
    const double g2 = cfg.gamma * cfg.gamma;
    const double lower_slope = 2.0 / (g2 + 1.0);
    const double upper_slope = 2.0 * g2 / (g2 + 1.0);
    if (r < 0.0) return lower_slope * std::max(r, -cfg.c);
    return upper_slope * std::min(r, cfg.c);
}

double gamma_to_q(double gamma) {
    if (!(gamma > 0.0)) throw InputError("gamma must be positive");
    const double g2 = gamma * gamma;
    return g2 / (g2 + 1.0);
}

double q_to_gamma(double q) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("q must lie in (0, 1)");
    return std::sqrt(q / (1.0 - q));
}

double median(std::vector<double> values) {
    if (values.empty()) throw InputError("median of an empty vector");
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

RobustScale mad_scale(std::span<const double> residuals, MadCenter center) {
    if (residuals.size() < 2) throw InputError("MAD needs at least two residuals");
    std::vector<double> values(residuals.begin(), residuals.end());
    const double m = center == MadCenter::Median ? median(values) : 0.0;
    for (double& v : values) v = std::abs(v - m);
    const double s = kMadConsistency * median(std::move(values));
    if (!(s > 0.0)) throw ZeroScaleError("MAD scale of residuals is zero");
    return {ScaleKind::Mad, s};
}

namespace {

// Pairs (i < j) of the sorted vector whose difference is <= v.
std::uint64_t count_pairs_within(const std::vector<double>& sorted, double v) {
    std::uint64_t count = 0;
    std::size_t i = 0;
    for (std::size_t j = 1; j < sorted.size(); ++j) {
        while (sorted[j] - sorted[i] > v) ++i;
        count += j - i;
    }
    return count;
}

}  // namespace

RobustScale qn_scale(std::span<const double> residuals) {
    const std::size_t n = residuals.size();
    if (n < 2) throw InputError("Q_n needs at least two residuals");
    std::vector<double> sorted(residuals.begin(), residuals.end());
    std::sort(sorted.begin(), sorted.end());

    const std::uint64_t h = n / 2 + 1;
    const std::uint64_t k = h * (h - 1) / 2;

    // Smallest double v with at least k pairwise differences <= v is exactly
    // the k-th order statistic. Nonnegative doubles order like their bits.
    const double span = sorted.back() - sorted.front();
    std::uint64_t lo = 0;
    std::uint64_t hi = std::bit_cast<std::uint64_t>(span);
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (count_pairs_within(sorted, std::bit_cast<double>(mid)) >= k)
            hi = mid;
        else
            lo = mid + 1;
    }
    const double s = kQnConsistency * std::bit_cast<double>(lo);
    if (!(s > 0.0)) throw ZeroScaleError("Q_n scale of residuals is zero");
    return {ScaleKind::Qn, s};
}

RobustScale robust_scale(std::span<const double> residuals, ScaleKind kind) {
    return kind == ScaleKind::Mad ? mad_scale(residuals) : qn_scale(residuals);
}

const char* to_string(ScaleKind kind) {
    return kind == ScaleKind::Mad ? "mad" : "qn";
}

ScaleKind parse_scale_kind(const std::string& text) {
    if (text == "mad") return ScaleKind::Mad;
    if (text == "qn") return ScaleKind::Qn;
    throw InputError("unknown scale kind '" + text + "' (expected mad or qn)");
}

}  // namespace sae
