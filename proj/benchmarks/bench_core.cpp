#include <benchmark/benchmark.h>

#include "sae/estimate.hpp"
#include "sae/functional_gini.hpp"
#include "sae/psi.hpp"
#include "sae/robust_fit.hpp"
#include "sae/sim.hpp"
#include "sae/tuning.hpp"

namespace {

// One reference-study sample: 40 areas, 300 units, 15 sampled.
sae::SurveyData study_sample(std::uint64_t seed) {
    sae::Scenario s;
    s.lambda = 40.0;
    s.methods = {sae::SimMethod::ReblupAbc};
    sae::Rng rng(seed);
    const auto gen = sae::gen_population(s, rng);
    return sae::make_survey(gen.population, sae::srswor(gen.population, 15, rng));
}

std::vector<double> draws(std::size_t n) {
    sae::Rng rng(3);
    return sae::skew_t_sample(3.0, 40.0, rng, n, true);
}

void BM_QnScale(benchmark::State& state) {
    const auto x = draws(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sae::qn_scale(x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_QnScale)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_EmpiricalGini(benchmark::State& state) {
    auto x = draws(static_cast<std::size_t>(state.range(0)));
    for (auto& v : x) v = 100.0 + v;
    for (auto _ : state) benchmark::DoNotOptimize(sae::empirical_gini(x));
}
BENCHMARK(BM_EmpiricalGini)->Arg(300)->Arg(10000);

// One area of the study: n = 15 observed, N - n = 285 predictions.
void BM_CdfAbcGini(benchmark::State& state) {
    const auto e = draws(300);
    std::vector<double> observed(15), predicted(285), residuals(15);
    for (std::size_t i = 0; i < 15; ++i) observed[i] = 110.0 + e[i], residuals[i] = e[i];
    for (std::size_t i = 0; i < 285; ++i) predicted[i] = 110.0 + 0.01 * static_cast<double>(i);
    const double scale = sae::qn_scale(residuals).value;
    const sae::AsymHuberConfig psi{3.0, 0.75};
    for (auto _ : state) benchmark::DoNotOptimize(sae::gini_from_cdf(sae::cdf_abc(observed, predicted, residuals, psi, scale)));
}
BENCHMARK(BM_CdfAbcGini);

void BM_FitReblup(benchmark::State& state) {
    const auto data = study_sample(11);
    for (auto _ : state) benchmark::DoNotOptimize(sae::fit_reblup(data));
}
BENCHMARK(BM_FitReblup)->Unit(benchmark::kMillisecond);

void BM_EstimateAllAreas(benchmark::State& state) {
    const auto data = study_sample(11);
    const auto model = sae::fit_reblup(data);
    sae::EstimatorSpec spec;
    spec.method = static_cast<sae::Method>(state.range(0));
    spec.gamma.reset();
    for (auto _ : state) benchmark::DoNotOptimize(sae::estimate_gini(model, data, spec));
    state.SetLabel(sae::to_string(spec.method));
}
BENCHMARK(BM_EstimateAllAreas)
    ->Arg(static_cast<int>(sae::Method::SBC))
    ->Arg(static_cast<int>(sae::Method::ABC))
    ->Arg(static_cast<int>(sae::Method::IfABC))
    ->Unit(benchmark::kMillisecond);

void BM_BootstrapTune(benchmark::State& state) {
    const auto data = study_sample(11);
    const auto model = sae::fit_reblup(data);
    auto grid = sae::TuningGrid::defaults();
    grid.B = static_cast<int>(state.range(0));
    sae::EstimatorSpec spec;
    sae::TuneOptions opt;
    opt.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sae::bootstrap_tune(data, model, grid, spec, 7, opt));
}
BENCHMARK(BM_BootstrapTune)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
