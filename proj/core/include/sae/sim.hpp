#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sae/data.hpp"
#include "sae/estimate.hpp"
#include "sae/rng.hpp"
#include "sae/tuning.hpp"

namespace sae {

enum class SimMethod { Eblup, Reblup, ReblupSbc, ReblupAbc, MqSbc, MqAbc, IfSbc, IfAbc };

enum class TuningMode { Heuristic, Bootstrap };

struct Scenario {
    std::string name = "scenario";
    int d = 40;
    int big_n = 300;  // units per area
    int n = 15;       // sampled units per area
    double beta0 = 100.0;
    double beta1 = 5.0;
    double x_meanlog = 1.0;
    double x_sdlog = 0.5;
    double sigma_u = 1.0;
    double nu = 3.0;
    double lambda = 1.0;
    bool centered = true;
    double error_scale = 1.0;  // multiplies the skewed-t error; 0 gives a noise-free model
    int reps = 100;
    std::uint64_t seed = 1;
    std::vector<SimMethod> methods;

    TuningMode tuning = TuningMode::Heuristic;
    double c_reblup = 3.0;  // REBLUP-/MQ- calibration constant
    double c_if = 2.0;      // IF- calibration constant
    double huber_c = 1.345; // robust fitting constant
    GammaOptions gamma_options{};
    ScaleKind scale_kind = ScaleKind::Qn;
    PseudoReference reference = PseudoReference::Combined;
    TuningGrid bootstrap_grid{};  // used when tuning == Bootstrap

    void validate() const;
};

/// E|T| for a Student t with nu > 1 degrees of freedom.
double skew_t_abs_mean(double nu);

/// Mean of the two-piece skewed t with skewness lambda.
double skew_t_mean(double nu, double lambda);

/// Two-piece (Fernandez-Steel) skewed t draws: lambda |t| with probability
/// lambda^2 / (1 + lambda^2), otherwise -|t| / lambda. `centered` subtracts
/// the analytic mean.
std::vector<double> skew_t_sample(double nu, double lambda, Rng& rng, std::size_t n, bool centered = false);

struct GeneratedPopulation {
    Population population;
    std::vector<double> true_gini;  // per area, aligned with population.areas
    std::size_t floored = 0;        // negative outcomes set to 0
    bool floored_flag = false;      // floored share above 0.1%
};

GeneratedPopulation gen_population(const Scenario& scenario, Rng& rng);

/// Sorted indices of an SRSWOR draw of n out of big_n.
std::vector<std::size_t> srswor(std::size_t big_n, std::size_t n, Rng& rng);

/// One SRSWOR draw of n units from every area (sorted indices per area).
std::vector<std::vector<std::size_t>> srswor(const Population& population, std::size_t n, Rng& rng);

/// Joins a population with a sample: sampled rows keep their outcomes, the
/// rest contribute covariates only.
SurveyData make_survey(const Population& population, const std::vector<std::vector<std::size_t>>& sample);

struct MethodSummary {
    std::vector<double> rel_bias;  // per area
    std::vector<double> rrmse;     // per area
    double median_rel_bias = 0.0;
    double median_rrmse = 0.0;
    int failed_reps = 0;
    bool aborted = false;  // more than 10% of replicates failed
};

struct ScenarioResult {
    std::string name;
    std::vector<int> area_ids;
    std::vector<double> true_gini;
    double median_true_gini = 0.0;
    std::size_t floored = 0;
    bool floored_flag = false;
    std::vector<SimMethod> methods;
    /// estimates[m][rep][area]; NaN where the replicate failed.
    std::vector<std::vector<std::vector<double>>> estimates;
    std::vector<MethodSummary> summary;  // aligned with methods

    const MethodSummary& of(SimMethod method) const;
};

/// One population, `reps` independent samples, every method per replicate.
/// Replicate h uses the seed stream split_seed(seed, h + 1), so the result
/// does not depend on `threads`.
ScenarioResult run_scenario(const Scenario& scenario, unsigned threads = 0);

/// The six scenarios of the reference study (1a-1c centred, 2a-2c not).
std::vector<Scenario> reference_scenarios(int reps = 100, std::uint64_t seed = 20240501);

std::vector<SimMethod> all_sim_methods();
const char* to_string(SimMethod method);
SimMethod parse_sim_method(const std::string& text);
const char* to_string(TuningMode mode);
TuningMode parse_tuning_mode(const std::string& text);

}  // namespace sae
