#pragma once

#include <random>
#include <vector>

#include "sae/data.hpp"
#include "sae/rng.hpp"

namespace fixture {

/// Nested-error sample y = b0 + b1 x + u_j + e with Gaussian u and e, plus
/// `unsampled` covariate rows per area. Area ids are 1..d.
inline sae::SurveyData nested_error(int d, int n, int unsampled, double b0, double b1, double sigma_u,
                                    double sigma_e, std::uint64_t seed) {
    sae::Rng rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::lognormal_distribution<double> xlaw(1.0, 0.5);
    sae::SurveyData data;
    data.p = 2;
    for (int j = 0; j < d; ++j) {
        sae::AreaData a;
        a.id = j + 1;
        a.x_sampled.resize(n, 2);
        a.y_sampled.resize(n);
        a.x_unsampled.resize(unsampled, 2);
        const double u = sigma_u * z(rng);
        for (int i = 0; i < n; ++i) {
            a.x_sampled(i, 0) = 1.0;
            a.x_sampled(i, 1) = xlaw(rng);
            a.y_sampled[i] = b0 + b1 * a.x_sampled(i, 1) + u + sigma_e * z(rng);
        }
        for (int k = 0; k < unsampled; ++k) {
            a.x_unsampled(k, 0) = 1.0;
            a.x_unsampled(k, 1) = xlaw(rng);
        }
        data.areas.push_back(std::move(a));
    }
    return data;
}

/// The shipped 3-area toy: 8 sampled and 40 unsampled units per area, with a
/// large positive outlier in areas 2 and 3.
inline sae::SurveyData toy() {
    auto data = nested_error(3, 8, 40, 100.0, 5.0, 1.0, 2.0, 2024);
    data.areas[1].y_sampled[2] += 25.0;
    data.areas[2].y_sampled[5] += 40.0;
    return data;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace fixture
