#pragma once

#include <span>
#include <utility>
#include <vector>

namespace sae {

/// Discrete distribution on strictly increasing support points. Evaluation
/// is the right-continuous step function F(t) = sum of weights at points <= t.
class WeightedCdf {
public:
    struct Atom {
        double point;
        double weight;
    };

    WeightedCdf() = default;

    /// Sorts atoms by point and merges exact ties by summing their weights.
    /// Weights are taken as given (no renormalisation).
    static WeightedCdf from_atoms(std::vector<Atom> atoms);
    static WeightedCdf equal_mass(std::span<const double> values);

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    double operator()(double t) const;
    std::vector<double> cumulative() const;
    double total_mass() const;
    double mean() const;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// Gini index 2 I / mu - 1 with I = sum t F(t) w and the inclusive cumulative
/// convention F(t_i) = mass up to and including t_i. Requires nonnegative
/// support and a positive mean.
double gini_from_cdf(const WeightedCdf& cdf);

}  // namespace sae
