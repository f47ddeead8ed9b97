#include "sae/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sae/error.hpp"
#include "sae/parallel.hpp"

namespace sae {

TuningGrid TuningGrid::defaults() { return product({1.0, 2.0, 3.0}, {0.5, 0.75, 1.0, 1.25, 1.5, 2.0}, 100); }

TuningGrid TuningGrid::product(const std::vector<double>& c, const std::vector<double>& gamma, int B) {
    TuningGrid g;
    g.B = B;
    for (double ci : c)
        for (double gi : gamma) g.cells.emplace_back(ci, gi);
    return g;
}

double TuningGrid::winsor_c() const {
    if (c2) return *c2;
    double max_c = 0.0;
    for (const auto& [c, g] : cells) max_c = std::max(max_c, c);
    return max_c + 1.0;
}

void TuningGrid::validate() const {
    if (cells.empty()) throw InputError("tuning grid is empty");
    if (B < 1) throw InputError("bootstrap replicate count must be at least 1");
    for (const auto& [c, g] : cells) AsymHuberConfig{c, g}.validate();
    const double w = winsor_c();
    for (const auto& [c, g] : cells)
        if (!(w > c)) throw InputError("winsorisation constant c2 must exceed every grid c");
}

double SurfaceCell::rrmse_sqrt() const { return std::sqrt(rrmse); }

std::map<int, TuningConstants> TuningResult::chosen() const {
    std::map<int, TuningConstants> out;
    for (const auto& a : areas)
        if (!a.excluded) out[a.area_id] = {a.cells[a.chosen].c, a.cells[a.chosen].gamma};
    return out;
}

const AreaSurface& TuningResult::area(int id) const {
    for (const auto& a : areas)
        if (a.area_id == id) return a;
    throw InputError("no tuning surface for area " + std::to_string(id));
}

AreaResiduals winsorize_residuals(const AreaResiduals& residuals, double c2) {
    const HuberConfig huber{c2};
    huber.validate();
    AreaResiduals out;
    for (const auto& [id, e] : residuals) {
        std::vector<double> abs_e(static_cast<std::size_t>(e.size()));
        for (Eigen::Index i = 0; i < e.size(); ++i) abs_e[static_cast<std::size_t>(i)] = std::abs(e[i]);
        const double w = abs_e.empty() ? 0.0 : kMadConsistency * median(std::move(abs_e));
        Vector r(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) r[i] = w > 0.0 ? w * huber_psi(e[i] / w, huber) : 0.0;
        out.emplace(id, std::move(r));
    }
    return out;
}

Vector resample_block(const Vector& pool, Rng& rng) {
    if (pool.size() == 0) return pool;
    std::uniform_int_distribution<Eigen::Index> pick(0, pool.size() - 1);
    Vector out(pool.size());
    for (Eigen::Index i = 0; i < pool.size(); ++i) out[i] = pool[pick(rng)];
    return out;
}

FittedModel refit(const FittedModel& model, const SurveyData& data, const TuneOptions& options) {
    if (model.kind == FitKind::MQuantile) return fit_mq(data, options.mq);
    ReblupOptions opts = options.reblup;
    if (options.refit == RefitMode::ReuseVariance)
        opts.fixed_variances = std::make_pair(model.sigma_e * model.sigma_e, model.sigma_u * model.sigma_u);
    return fit_reblup(data, opts);
}

namespace {

std::vector<int> target_areas(const SurveyData& data, Scope scope) {
    std::vector<int> ids;
    for (const auto& a : data.areas)
        if (scope == Scope::Full || a.is_sampled()) ids.push_back(a.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

EstimatorSpec cell_spec(const EstimatorSpec& base, double c, double gamma) {
    EstimatorSpec spec = base;
    spec.c = c;
    spec.gamma = gamma;
    spec.per_area.clear();
    return spec;
}

}  // namespace

TuningResult bootstrap_tune(const SurveyData& data, const FittedModel& model, const TuningGrid& grid,
                            const EstimatorSpec& estimator, std::uint64_t seed, const TuneOptions& options) {
    grid.validate();
    data.validate();
    const double c2 = grid.winsor_c();
    const auto targets = target_areas(data, estimator.scope);
    if (targets.empty()) throw InputError("no areas to tune");
    const std::size_t n_cells = grid.cells.size();
    const std::size_t n_areas = targets.size();

    std::vector<const AreaData*> sampled;
    for (const auto& a : data.areas)
        if (a.is_sampled()) sampled.push_back(&a);
    std::sort(sampled.begin(), sampled.end(), [](const AreaData* a, const AreaData* b) { return a->id < b->id; });

    // Steps 1-3: original estimates on {y_ij} and the point predictions.
    const auto original_preds = area_predictions(model, data);
    std::vector<std::vector<double>> original(n_cells, std::vector<double>(n_areas));
    for (std::size_t k = 0; k < n_cells; ++k) {
        const auto est = estimate_gini(original_preds, cell_spec(estimator, grid.cells[k].first, grid.cells[k].second),
                                       targets);
        for (std::size_t a = 0; a < n_areas; ++a) original[k][a] = est.areas[a].gini;
    }

    // Step 4: winsorised residual pools.
    const auto pools = winsorize_residuals(residuals(model, data), c2);
    std::map<int, Vector> fitted;
    for (const auto* a : sampled) fitted.emplace(a->id, fitted_values(model, *a));

    // Steps 5-9, one slot per replicate.
    const std::size_t B = static_cast<std::size_t>(grid.B);
    std::vector<std::vector<std::vector<double>>> boot(B);
    std::vector<char> failed(B, 0);
    parallel_for(B, options.threads, [&](std::size_t b) {
        Rng rng(split_seed(seed, b + 1));
        SurveyData star = data;
        for (const auto* a : sampled) {
            const Vector res = resample_block(pools.at(a->id), rng);
            auto it = std::find_if(star.areas.begin(), star.areas.end(), [&](const AreaData& s) { return s.id == a->id; });
            it->y_sampled = fitted.at(a->id) + res;
        }
        try {
            const FittedModel m = refit(model, star, options);
            std::vector<AreaPrediction> preds;
            preds.reserve(star.areas.size());
            for (const auto& a : star.areas) {
                AreaPrediction p = make_area_prediction(m, a);
                p.observed = data.area(a.id).y_sampled;
                preds.push_back(std::move(p));
            }
            auto& slot = boot[b];
            slot.assign(n_cells, std::vector<double>(n_areas));
            for (std::size_t k = 0; k < n_cells; ++k) {
                const auto est =
                    estimate_gini(preds, cell_spec(estimator, grid.cells[k].first, grid.cells[k].second), targets);
                for (std::size_t a = 0; a < n_areas; ++a) slot[k][a] = est.areas[a].gini;
            }
        } catch (const NumericalError&) {
            failed[b] = 1;
        }
    });

    TuningResult result;
    result.c2 = c2;
    result.failed_replicates = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
    result.replicates = grid.B - result.failed_replicates;
    if (result.failed_replicates > options.max_failure_share * grid.B)
        throw NumericalError("bootstrap refit failed in " + std::to_string(result.failed_replicates) + " of " +
                             std::to_string(grid.B) + " replicates");

    // Step 10-11, reduced in replicate order.
    for (std::size_t a = 0; a < n_areas; ++a) {
        AreaSurface s;
        s.area_id = targets[a];
        for (std::size_t k = 0; k < n_cells; ++k) {
            SurfaceCell cell{grid.cells[k].first, grid.cells[k].second, original[k][a], 0.0, 0.0};
            if (cell.original == 0.0) {
                s.excluded = true;
                cell.rrmse = cell.bias = std::numeric_limits<double>::quiet_NaN();
            } else {
                double sum = 0.0, sum_sq = 0.0;
                for (std::size_t b = 0; b < B; ++b) {
                    if (failed[b]) continue;
                    const double rel = (boot[b][k][a] - cell.original) / cell.original;
                    sum += rel;
                    sum_sq += rel * rel;
                }
                cell.bias = sum / result.replicates;
                cell.rrmse = sum_sq / result.replicates;
            }
            s.cells.push_back(cell);
        }
        if (!s.excluded) {
            for (std::size_t k = 1; k < n_cells; ++k)
                if (s.cells[k].rrmse < s.cells[s.chosen].rrmse) s.chosen = k;
        }
        result.areas.push_back(std::move(s));
    }
    return result;
}

const char* to_string(RefitMode mode) { return mode == RefitMode::Full ? "full" : "reuse-variance"; }

}  // namespace sae
