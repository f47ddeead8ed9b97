#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sae/robust_fit.hpp"

namespace sae {

/// How each block of residuals is centred before signs are counted. The
/// skewed family behind the estimator has its mode at zero, so Mode (the
/// half-sample mode) is the consistent choice; Median forces gamma = 1 for
/// odd block sizes.
enum class Centering { None, Mean, Median, Mode };

struct GammaOptions {
    Centering centering = Centering::Mode;
    double min_gamma = 0.2;
    double max_gamma = 5.0;
};

struct GammaValue {
    double gamma = 1.0;
    bool clamped = false;
};

/// Skewness estimate sqrt(n^- / n^+) over centred residuals. Exact zeros
/// count half to each side. Result clamped to [min_gamma, max_gamma].
GammaValue estimate_gamma(std::span<const double> residuals, const GammaOptions& options = {});

/// Per-area estimates plus one pooled value over the concatenation of the
/// per-area centred blocks.
struct GammaEstimate {
    std::map<int, GammaValue> per_area;
    GammaValue pooled;
};

GammaEstimate estimate_gamma(const AreaResiduals& residuals, const GammaOptions& options = {});

/// Half-sample mode (Bickel and Fruehwirth): repeatedly keep the shortest
/// half of the sorted values. When the shortest half is not unique the
/// median of the remaining values is returned.
double half_sample_mode(std::span<const double> values);

std::vector<double> center_residuals(std::span<const double> residuals, Centering centering);

const char* to_string(Centering centering);
Centering parse_centering(const std::string& text);

}  // namespace sae
