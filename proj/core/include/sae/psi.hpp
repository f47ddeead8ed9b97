#pragma once

#include <span>
#include <string>
#include <vector>

namespace sae {

/// Symmetric Huber truncation: residuals are clipped to [-c, c].
struct HuberConfig {
    double c = 1.345;
    void validate() const;
};

/// Skewed Huber truncation. gamma > 1 stretches the positive side of the
/// window and shrinks the negative side; gamma == 1 is the symmetric case.
struct AsymHuberConfig {
    double c = 1.345;
    double gamma = 1.0;
    void validate() const;
};

enum class ScaleKind { Mad, Qn };

struct RobustScale {
    ScaleKind kind;
    double value;
};

/// Where the median absolute deviation is measured from.
enum class MadCenter { Median, Zero };

inline constexpr double kMadConsistency = 1.4826;
inline constexpr double kQnConsistency = 2.2219;

double huber_psi(double r, const HuberConfig& cfg);
double asym_huber_psi(double r, const AsymHuberConfig& cfg);

/// q = gamma^2 / (gamma^2 + 1), the quantile level matching a skew gamma.
double gamma_to_q(double gamma);
double q_to_gamma(double q);

double median(std::vector<double> values);

/// 1.4826 * median |r - m| where m is the sample median (or zero).
/// Throws ZeroScaleError when the result is zero.
RobustScale mad_scale(std::span<const double> residuals, MadCenter center = MadCenter::Median);

/// Rousseeuw-Croux Q_n: 2.2219 times the k-th smallest |r_i - r_j| (i < j),
/// k = C(h, 2), h = floor(n/2) + 1. Throws ZeroScaleError when zero.
RobustScale qn_scale(std::span<const double> residuals);

RobustScale robust_scale(std::span<const double> residuals, ScaleKind kind);

const char* to_string(ScaleKind kind);
ScaleKind parse_scale_kind(const std::string& text);

}  // namespace sae
