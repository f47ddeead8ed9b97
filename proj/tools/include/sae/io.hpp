#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sae/data.hpp"
#include "sae/estimate.hpp"
#include "sae/sim.hpp"
#include "sae/tuning.hpp"

namespace sae::io {

namespace fs = std::filesystem;

/// Header plus string cells. Numbers are written in shortest round-trip form,
/// so read -> write reproduces an emitted file byte for byte.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index; throws InputError naming the column and `source`.
    std::size_t column(std::string_view name, const std::string& source = "table") const;
    std::optional<std::size_t> find_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const fs::path& path);
std::string format_csv(const CsvTable& table);
void write_csv(const fs::path& path, const CsvTable& table);

std::string format_number(double value);
/// Strict parse of a whole cell; `where` names the location in errors.
double parse_number(std::string_view text, const std::string& where);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view content);
std::string sha256_hex(std::string_view bytes);

/// Sample CSV (area_id, y, x1..xp) and population CSV (area_id, x1..xp) with
/// every unit of the population, sampled ones included. Each sampled unit
/// is matched to one population row of its area with identical covariates;
/// the remaining rows are the unsampled units. An intercept is prepended.
SurveyData load_survey(const fs::path& sample, const fs::path& population);

/// Writes `data` back as the two CSV files load_survey reads.
void save_survey(const SurveyData& data, const fs::path& sample, const fs::path& population);

enum class ModelKind { Reblup, MQuantile };

struct EstimateConfig {
    fs::path sample;
    fs::path population;
    ModelKind model = ModelKind::Reblup;
    double huber_c = 1.345;
    EstimatorSpec spec{};
    bool export_cdf = false;
};

struct TuneConfig {
    fs::path sample;
    fs::path population;
    ModelKind model = ModelKind::Reblup;
    double huber_c = 1.345;
    EstimatorSpec spec{};
    TuningGrid grid = TuningGrid::defaults();
    RefitMode refit = RefitMode::Full;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct SimulateConfig {
    std::uint64_t seed = 20240501;
    unsigned threads = 0;
    std::vector<Scenario> scenarios;
};

/// YAML configs. Errors are InputError with "path:line:column: message".
/// Relative data paths are resolved against the config file's directory.
EstimateConfig load_estimate_config(const fs::path& path);
TuneConfig load_tune_config(const fs::path& path);
SimulateConfig load_simulate_config(const fs::path& path, std::optional<std::uint64_t> seed_override = {});

ModelKind parse_model_kind(const std::string& text);
const char* to_string(ModelKind kind);
RefitMode parse_refit_mode(const std::string& text);

FittedModel fit_model(const SurveyData& data, ModelKind kind, double huber_c);

CsvTable estimates_table(const EstimateResult& result);
CsvTable cdf_table(const EstimateResult& result);
CsvTable surface_table(const TuningResult& result);
CsvTable chosen_table(const TuningResult& result);
/// Long format: scenario, area, method, rel_bias, rrmse.
CsvTable scenario_table(const ScenarioResult& result);
/// One row per scenario and method with the medians.
CsvTable summary_table(const std::vector<ScenarioResult>& results);
/// Fixed-width text rendering of summary_table.
std::string summary_text(const std::vector<ScenarioResult>& results);

}  // namespace sae::io
