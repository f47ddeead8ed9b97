#include "sae/weighted_cdf.hpp"

#include <algorithm>

#include "sae/error.hpp"

namespace sae {

WeightedCdf WeightedCdf::from_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.point < b.point; });
    WeightedCdf cdf;
    cdf.points_.reserve(atoms.size());
    cdf.weights_.reserve(atoms.size());
    for (const auto& atom : atoms) {
        if (atom.weight < 0.0) throw InputError("negative probability mass");
        if (!cdf.points_.empty() && cdf.points_.back() == atom.point) {
            cdf.weights_.back() += atom.weight;
        } else {
            cdf.points_.push_back(atom.point);
            cdf.weights_.push_back(atom.weight);
        }
    }
    return cdf;
}

WeightedCdf WeightedCdf::equal_mass(std::span<const double> values) {
    if (values.empty()) throw InputError("empty sample");
    const double w = 1.0 / static_cast<double>(values.size());
    std::vector<Atom> atoms;
    atoms.reserve(values.size());
    for (double v : values) atoms.push_back({v, w});
    return from_atoms(std::move(atoms));
}

double WeightedCdf::operator()(double t) const {
    const auto end = std::upper_bound(points_.begin(), points_.end(), t);
    double mass = 0.0;
    for (auto i = 0; i < end - points_.begin(); ++i) mass += weights_[static_cast<std::size_t>(i)];
    return mass;
}

std::vector<double> WeightedCdf::cumulative() const {
    std::vector<double> out(weights_.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) out[i] = (mass += weights_[i]);
    return out;
}

double WeightedCdf::total_mass() const {
    double mass = 0.0;
    for (double w : weights_) mass += w;
    return mass;
}

double WeightedCdf::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) m += points_[i] * weights_[i];
    return m;
}

double gini_from_cdf(const WeightedCdf& cdf) {
    if (cdf.empty()) throw InputError("Gini of an empty distribution");
    if (cdf.points().front() < 0.0) throw InputError("Gini requires nonnegative support");
    const auto& t = cdf.points();
    const auto& w = cdf.weights();
    double mu = 0.0;
    double integral = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mass += w[i];
        mu += t[i] * w[i];
        integral += t[i] * w[i] * mass;
    }
    if (!(mu > 0.0)) throw NumericalError("Gini requires a positive mean");
    return 2.0 * integral / mu - 1.0;
}

}  // namespace sae
