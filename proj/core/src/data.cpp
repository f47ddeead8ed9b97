#include "sae/data.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sae/error.hpp"

namespace sae {

const AreaData& SurveyData::area(int id) const {
    auto it = std::find_if(areas.begin(), areas.end(), [id](const AreaData& a) { return a.id == id; });
    if (it == areas.end()) throw InputError("unknown area id " + std::to_string(id));
    return *it;
}

std::size_t SurveyData::total_sample_size() const {
    std::size_t n = 0;
    for (const auto& a : areas) n += a.sample_size();
    return n;
}

std::size_t SurveyData::sampled_area_count() const {
    return static_cast<std::size_t>(
        std::count_if(areas.begin(), areas.end(), [](const AreaData& a) { return a.is_sampled(); }));
}

void SurveyData::validate() const {
    if (p < 1) throw InputError("model needs at least the intercept column");
    for (const auto& a : areas) {
        const std::string where = "area " + std::to_string(a.id);
        if (a.x_sampled.rows() != a.y_sampled.size())
            throw InputError(where + ": sampled covariate rows do not match outcomes");
        if ((a.x_sampled.rows() > 0 && a.x_sampled.cols() != p) ||
            (a.x_unsampled.rows() > 0 && a.x_unsampled.cols() != p))
            throw InputError(where + ": covariate width differs from p=" + std::to_string(p));
        auto intercept_ok = [](const Matrix& x) {
            return x.rows() == 0 || (x.col(0).array() == 1.0).all();
        };
        if (!intercept_ok(a.x_sampled) || !intercept_ok(a.x_unsampled))
            throw InputError(where + ": first covariate must be the constant 1");
        if (a.population_size() == 0) throw InputError(where + ": empty area");
    }
}

const PopulationArea& Population::area(int id) const {
    auto it = std::find_if(areas.begin(), areas.end(), [id](const PopulationArea& a) { return a.id == id; });
    if (it == areas.end()) throw InputError("unknown area id " + std::to_string(id));
    return *it;
}

}  // namespace sae
