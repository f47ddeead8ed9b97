#pragma once

// Second, independent implementation of the residual bootstrap used to
// cross-check bootstrap_tune. It shares only the fitter and the estimator
// with the library and consumes the same seed stream in the same order.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sae/estimate.hpp"
#include "sae/robust_fit.hpp"
#include "sae/rng.hpp"

namespace oracle {

struct BootCell {
    double original = 0.0;
    double mse = 0.0;   // mean squared relative error
    double bias = 0.0;  // mean relative error
};

/// surface[cell][area] over the sampled areas in ascending id order.
inline std::vector<std::vector<BootCell>> bootstrap_surface(const sae::SurveyData& data, const sae::FittedModel& model,
                                                            const std::vector<std::pair<double, double>>& cells,
                                                            int B, double c2, const sae::EstimatorSpec& base,
                                                            std::uint64_t seed) {
    std::vector<const sae::AreaData*> areas;
    for (const auto& a : data.areas)
        if (a.is_sampled()) areas.push_back(&a);
    std::sort(areas.begin(), areas.end(), [](auto* x, auto* y) { return x->id < y->id; });
    std::vector<int> ids;
    for (auto* a : areas) ids.push_back(a->id);

    auto spec_for = [&](std::size_t k) {
        sae::EstimatorSpec s = base;
        s.c = cells[k].first;
        s.gamma = cells[k].second;
        s.per_area.clear();
        return s;
    };

    // Winsorised pools: clip each residual at c2 times 1.4826 median |e|.
    std::vector<std::vector<double>> pools;
    std::vector<sae::Vector> fitted;
    for (auto* a : areas) {
        const sae::Vector f = a->x_sampled * model.beta + sae::Vector::Constant(a->x_sampled.rows(), model.u.at(a->id));
        std::vector<double> e;
        for (Eigen::Index i = 0; i < f.size(); ++i) e.push_back(a->y_sampled[i] - f[i]);
        const double w = mad(e);
        std::vector<double> pool;
        for (double v : e) pool.push_back(std::clamp(v, -c2 * w, c2 * w));
        pools.push_back(pool);
        fitted.push_back(f);
    }

    std::vector<std::vector<BootCell>> out(cells.size(), std::vector<BootCell>(ids.size()));
    const auto preds0 = sae::area_predictions(model, data);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto est = sae::estimate_gini(preds0, spec_for(k), ids);
        for (std::size_t j = 0; j < ids.size(); ++j) out[k][j].original = est.areas[j].gini;
    }

    for (int b = 0; b < B; ++b) {
        sae::Rng rng(sae::split_seed(seed, static_cast<std::uint64_t>(b) + 1));
        sae::SurveyData star = data;
        for (std::size_t j = 0; j < areas.size(); ++j) {
            std::uniform_int_distribution<long> pick(0, static_cast<long>(pools[j].size()) - 1);
            auto& target = *std::find_if(star.areas.begin(), star.areas.end(),
                                         [&](const sae::AreaData& s) { return s.id == ids[j]; });
            for (Eigen::Index i = 0; i < target.y_sampled.size(); ++i)
                target.y_sampled[i] = fitted[j][i] + pools[j][static_cast<std::size_t>(pick(rng))];
        }
        const auto m = sae::fit_reblup(star);
        std::vector<sae::AreaPrediction> preds;
        for (const auto& a : star.areas) {
            sae::AreaPrediction p;
            p.area_id = a.id;
            p.observed = data.area(a.id).y_sampled;
            p.response = a.y_sampled;
            p.fitted = sae::fitted_values(m, a);
            p.predicted = sae::predict_unsampled(m, a);
            preds.push_back(p);
        }
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto est = sae::estimate_gini(preds, spec_for(k), ids);
            for (std::size_t j = 0; j < ids.size(); ++j) {
                auto& cell = out[k][j];
                const double rel = (est.areas[j].gini - cell.original) / cell.original;
                cell.bias += rel;
                cell.mse += rel * rel;
            }
        }
    }
    for (auto& row : out)
        for (auto& cell : row) {
            cell.bias /= B;
            cell.mse /= B;
        }
    return out;
}

}  // namespace oracle
