#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace sae {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One small area as seen by the estimators: the sampled units with their
/// outcomes plus the covariates of the non-sampled remainder. Covariate rows
/// carry a leading 1. Areas without sampled units ("out-of-sample areas")
/// have zero-row x_sampled and empty y_sampled.
struct AreaData {
    int id = 0;
    Matrix x_sampled;    // n_j x p
    Vector y_sampled;    // n_j
    Matrix x_unsampled;  // (N_j - n_j) x p

    std::size_t sample_size() const { return static_cast<std::size_t>(y_sampled.size()); }
    std::size_t unsampled_size() const { return static_cast<std::size_t>(x_unsampled.rows()); }
    std::size_t population_size() const { return sample_size() + unsampled_size(); }
    bool is_sampled() const { return y_sampled.size() > 0; }
};

/// A survey sample joined with the population frame, area by area.
struct SurveyData {
    int p = 0;
    std::vector<AreaData> areas;

    const AreaData& area(int id) const;
    std::size_t total_sample_size() const;
    std::size_t sampled_area_count() const;
    /// Throws InputError on inconsistent covariate widths or missing intercepts.
    void validate() const;
};

/// Full finite population (simulation ground truth or a census frame).
struct PopulationArea {
    int id = 0;
    Matrix x;   // N_j x p
    Vector y;   // N_j true outcomes; empty when unknown
};

struct Population {
    int p = 0;
    std::vector<PopulationArea> areas;

    const PopulationArea& area(int id) const;
};

}  // namespace sae
