#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sae/estimate.hpp"
#include "sae/rng.hpp"
#include "sae/robust_fit.hpp"

namespace sae {

struct TuningGrid {
    std::vector<std::pair<double, double>> cells;  // (c, gamma)
    int B = 100;
    std::optional<double> c2;  // winsorisation constant; default max c + 1

    /// c in {1, 2, 3} x gamma in {0.5, 0.75, 1, 1.25, 1.5, 2}.
    static TuningGrid defaults();
    static TuningGrid product(const std::vector<double>& c, const std::vector<double>& gamma, int B);

    double winsor_c() const;
    void validate() const;
};

enum class RefitMode {
    Full,          // complete refit of the robust model per replicate
    ReuseVariance  // approximate: variance components held at the original fit
};

struct TuneOptions {
    RefitMode refit = RefitMode::Full;
    ReblupOptions reblup{};
    MQuantileOptions mq{};
    unsigned threads = 0;
    double max_failure_share = 0.1;
};

struct SurfaceCell {
    double c = 0.0;
    double gamma = 1.0;
    double original = 0.0;  // estimate on the original sample
    double rrmse = 0.0;     // mean squared relative error
    double bias = 0.0;      // mean relative error
    double rrmse_sqrt() const;
};

struct AreaSurface {
    int area_id = 0;
    bool excluded = false;  // an original estimate was zero
    std::vector<SurfaceCell> cells;  // aligned with TuningGrid::cells
    std::size_t chosen = 0;
};

struct TuningResult {
    std::vector<AreaSurface> areas;
    int replicates = 0;          // successful replicates
    int failed_replicates = 0;
    double c2 = 0.0;

    /// Argmin-RRMSE (c, gamma) of every area that was not excluded.
    std::map<int, TuningConstants> chosen() const;
    const AreaSurface& area(int id) const;
};

/// psi_{c2}(e / w) * w with w = 1.4826 median |e| per area (measured from 0).
AreaResiduals winsorize_residuals(const AreaResiduals& residuals, double c2);

/// Bootstrap sample of an area block: draw i is pool[U{0..n-1}] with one
/// uniform_int_distribution call per unit, in unit order.
Vector resample_block(const Vector& pool, Rng& rng);

/// Nonparametric residual bootstrap over a (c, gamma) grid. Replicate b uses
/// Rng(split_seed(seed, b + 1)) and resamples the sampled areas in ascending
/// id order; every grid cell is evaluated on the same replicates. The
/// estimator's method and scope come from `estimator`; its constants are
/// replaced cell by cell.
TuningResult bootstrap_tune(const SurveyData& data, const FittedModel& model, const TuningGrid& grid,
                            const EstimatorSpec& estimator, std::uint64_t seed, const TuneOptions& options = {});

/// Refits `model`'s kind on new data.
FittedModel refit(const FittedModel& model, const SurveyData& data, const TuneOptions& options);

const char* to_string(RefitMode mode);

}  // namespace sae
