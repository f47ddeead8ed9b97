#include <algorithm>
#include <cmath>
#include <map>

#include "sae/error.hpp"
#include "sae/io.hpp"

namespace sae::io {

namespace {

int parse_area_id(const std::string& text, const std::string& where) {
    const double v = parse_number(text, where);
    if (!(v == std::floor(v)) || std::abs(v) > 2e9) throw InputError(where + ": area_id '" + text + "' is not an integer");
    return static_cast<int>(v);
}

struct Unit {
    std::vector<double> x;
    bool used = false;
};

}  // namespace

SurveyData load_survey(const fs::path& sample_path, const fs::path& population_path) {
    const auto sample = read_csv(sample_path);
    const auto population = read_csv(population_path);
    const std::string s_src = sample_path.string(), p_src = population_path.string();

    const std::size_t s_area = sample.column("area_id", s_src);
    const std::size_t s_y = sample.column("y", s_src);
    std::vector<std::string> covariates;
    std::vector<std::size_t> s_cols;
    for (std::size_t i = 0; i < sample.header.size(); ++i)
        if (i != s_area && i != s_y) {
            covariates.push_back(sample.header[i]);
            s_cols.push_back(i);
        }
    const std::size_t p_area = population.column("area_id", p_src);
    std::vector<std::size_t> p_cols;
    for (const auto& name : covariates) p_cols.push_back(population.column(name, p_src));

    std::map<int, std::vector<Unit>> units;
    for (std::size_t r = 0; r < population.rows.size(); ++r) {
        const auto& row = population.rows[r];
        const std::string where = p_src + ":" + std::to_string(r + 2);
        Unit u;
        for (std::size_t c : p_cols) u.x.push_back(parse_number(row[c], where));
        units[parse_area_id(row[p_area], where)].push_back(std::move(u));
    }

    SurveyData data;
    data.p = static_cast<int>(covariates.size()) + 1;
    std::map<int, std::vector<std::pair<std::vector<double>, double>>> sampled;
    for (std::size_t r = 0; r < sample.rows.size(); ++r) {
        const auto& row = sample.rows[r];
        const std::string where = s_src + ":" + std::to_string(r + 2);
        const int id = parse_area_id(row[s_area], where);
        std::vector<double> x;
        for (std::size_t c : s_cols) x.push_back(parse_number(row[c], where));
        const double y = parse_number(row[s_y], where);
        auto it = units.find(id);
        if (it == units.end()) throw InputError(where + ": area " + std::to_string(id) + " is not in the population");
        auto match = std::find_if(it->second.begin(), it->second.end(), [&](const Unit& u) { return !u.used && u.x == x; });
        if (match == it->second.end())
            throw InputError(where + ": sampled unit has no unused population row with the same covariates");
        match->used = true;
        sampled[id].emplace_back(std::move(x), y);
    }

    const auto p = static_cast<Eigen::Index>(data.p);
    for (auto& [id, all] : units) {
        AreaData a;
        a.id = id;
        const auto& s = sampled[id];
        a.x_sampled.resize(static_cast<Eigen::Index>(s.size()), p);
        a.y_sampled.resize(static_cast<Eigen::Index>(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            a.x_sampled(k, 0) = 1.0;
            for (Eigen::Index c = 1; c < p; ++c) a.x_sampled(k, c) = s[i].first[static_cast<std::size_t>(c - 1)];
            a.y_sampled[k] = s[i].second;
        }
        const auto rest = static_cast<Eigen::Index>(std::count_if(all.begin(), all.end(), [](const Unit& u) { return !u.used; }));
        a.x_unsampled.resize(rest, p);
        Eigen::Index k = 0;
        for (const auto& u : all) {
            if (u.used) continue;
            a.x_unsampled(k, 0) = 1.0;
            for (Eigen::Index c = 1; c < p; ++c) a.x_unsampled(k, c) = u.x[static_cast<std::size_t>(c - 1)];
            ++k;
        }
        data.areas.push_back(std::move(a));
    }
    data.validate();
    return data;
}

void save_survey(const SurveyData& data, const fs::path& sample_path, const fs::path& population_path) {
    CsvTable sample, population;
    sample.header = {"area_id", "y"};
    population.header = {"area_id"};
    for (int c = 1; c < data.p; ++c) {
        sample.header.push_back("x" + std::to_string(c));
        population.header.push_back("x" + std::to_string(c));
    }
    auto covariate_row = [](int id, const Matrix& x, Eigen::Index i) {
        std::vector<std::string> row{std::to_string(id)};
        for (Eigen::Index c = 1; c < x.cols(); ++c) row.push_back(format_number(x(i, c)));
        return row;
    };
    for (const auto& a : data.areas) {
        for (Eigen::Index i = 0; i < a.x_sampled.rows(); ++i) {
            auto row = covariate_row(a.id, a.x_sampled, i);
            row.insert(row.begin() + 1, format_number(a.y_sampled[i]));
            sample.rows.push_back(std::move(row));
            population.rows.push_back(covariate_row(a.id, a.x_sampled, i));
        }
        for (Eigen::Index i = 0; i < a.x_unsampled.rows(); ++i)
            population.rows.push_back(covariate_row(a.id, a.x_unsampled, i));
    }
    write_csv(sample_path, sample);
    write_csv(population_path, population);
}

}  // namespace sae::io
