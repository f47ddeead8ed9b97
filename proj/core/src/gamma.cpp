#include "sae/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sae/error.hpp"

namespace sae {

double half_sample_mode(std::span<const double> values) {
    if (values.empty()) throw InputError("mode of an empty vector");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    std::size_t lo = 0, n = v.size();
    while (n > 3) {
        const std::size_t h = (n + 1) / 2;
        std::size_t best = lo;
        double width = v[lo + h - 1] - v[lo];
        bool tied = false;
        for (std::size_t i = lo + 1; i + h <= lo + n; ++i) {
            const double wi = v[i + h - 1] - v[i];
            if (wi < width) {
                width = wi;
                best = i;
                tied = false;
            } else if (wi == width) {
                tied = true;
            }
        }
        // Several equally short halves: no unique mode, fall back to the median
        // of what is left so symmetric input stays centred at its middle.
        if (tied) return median(std::vector<double>(v.begin() + lo, v.begin() + lo + n));
        lo = best;
        n = h;
    }
    if (n == 1) return v[lo];
    if (n == 2) return 0.5 * (v[lo] + v[lo + 1]);
    const double left = v[lo + 1] - v[lo], right = v[lo + 2] - v[lo + 1];
    if (left < right) return 0.5 * (v[lo] + v[lo + 1]);
    if (right < left) return 0.5 * (v[lo + 1] + v[lo + 2]);
    return v[lo + 1];
}

std::vector<double> center_residuals(std::span<const double> residuals, Centering centering) {
    std::vector<double> out(residuals.begin(), residuals.end());
    if (out.empty() || centering == Centering::None) return out;
    double center = 0.0;
    switch (centering) {
        case Centering::Mean:
            center = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
            break;
        case Centering::Median: center = median(out); break;
        case Centering::Mode: center = half_sample_mode(out); break;
        case Centering::None: break;
    }
    for (double& e : out) e -= center;
    return out;
}

namespace {

GammaValue gamma_from_counts(double negative, double positive, const GammaOptions& options) {
    GammaValue g;
    if (positive <= 0.0) {
        g.gamma = options.max_gamma;
        g.clamped = true;
        return g;
    }
    const double raw = std::sqrt(negative / positive);
    g.gamma = std::clamp(raw, options.min_gamma, options.max_gamma);
    g.clamped = g.gamma != raw;
    return g;
}

void count_signs(std::span<const double> centred, double& negative, double& positive) {
    for (double e : centred) {
        if (e < 0.0)
            negative += 1.0;
        else if (e > 0.0)
            positive += 1.0;
        else {
            negative += 0.5;
            positive += 0.5;
        }
    }
}

}  // namespace

GammaValue estimate_gamma(std::span<const double> residuals, const GammaOptions& options) {
    if (residuals.empty()) throw InputError("gamma estimation needs residuals");
    double negative = 0.0, positive = 0.0;
    count_signs(center_residuals(residuals, options.centering), negative, positive);
    return gamma_from_counts(negative, positive, options);
}

GammaEstimate estimate_gamma(const AreaResiduals& residuals, const GammaOptions& options) {
    GammaEstimate out;
    double negative = 0.0, positive = 0.0;
    for (const auto& [id, e] : residuals) {
        if (e.size() == 0) throw InputError("area " + std::to_string(id) + " has no residuals");
        const std::span<const double> block(e.data(), static_cast<std::size_t>(e.size()));
        double neg = 0.0, pos = 0.0;
        count_signs(center_residuals(block, options.centering), neg, pos);
        out.per_area[id] = gamma_from_counts(neg, pos, options);
        negative += neg;
        positive += pos;
    }
    if (residuals.empty()) throw InputError("gamma estimation needs residuals");
    out.pooled = gamma_from_counts(negative, positive, options);
    return out;
}

const char* to_string(Centering centering) {
    switch (centering) {
        case Centering::None: return "none";
        case Centering::Mean: return "mean";
        case Centering::Median: return "median";
        case Centering::Mode: return "mode";
    }
    return "?";
}

Centering parse_centering(const std::string& text) {
    if (text == "none") return Centering::None;
    if (text == "mean") return Centering::Mean;
    if (text == "median") return Centering::Median;
    if (text == "mode") return Centering::Mode;
    throw InputError("unknown centering '" + text + "' (expected none, mean, median or mode)");
}

}  // namespace sae
