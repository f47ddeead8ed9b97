#pragma once

// Random tiny areas and the comparison of weighted CDFs against the
// indicator-sum oracle. Shared by the unit tests and the acceptance suite.

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sae/cdf_est.hpp"
#include "sae/psi.hpp"
#include "sae/rng.hpp"

namespace tiny {

/// One area with n in [min_n, 5] sampled units and N in [n, 10]. Half of the
/// instances live on a coarse lattice so support ties occur.
inline oracle::Area area(sae::Rng& rng, int min_n = 1) {
    std::uniform_int_distribution<int> nlaw(min_n, 5);
    const int n = nlaw(rng);
    std::uniform_int_distribution<int> rlaw(0, 10 - n);
    const int r = rlaw(rng);
    const bool lattice = std::bernoulli_distribution(0.5)(rng);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    auto draw = [&] { return lattice ? std::round(u(rng) * 2.0) / 2.0 : u(rng); };
    oracle::Area a;
    for (int i = 0; i < n; ++i) {
        a.y.push_back(draw());
        a.fitted.push_back(draw());
    }
    for (int k = 0; k < r; ++k) a.pred.push_back(draw());
    return a;
}

inline std::vector<double> residuals(const oracle::Area& a) {
    std::vector<double> e;
    for (std::size_t i = 0; i < a.y.size(); ++i) e.push_back(a.y[i] - a.fitted[i]);
    return e;
}

struct Comparison {
    bool same_support = false;
    double max_abs_diff = 0.0;  // over support points
    double mass_error = 0.0;    // |total mass - 1|
    bool ok(double tol = 1e-12) const { return same_support && max_abs_diff <= tol && mass_error <= 1e-10; }
};

/// Compares `cdf` with the oracle evaluated at every materialised support
/// point. `oracle_cdf(t)` gives the literal indicator sum.
template <class OracleCdf>
Comparison compare(const sae::WeightedCdf& cdf, const std::vector<double>& oracle_support, OracleCdf oracle_cdf) {
    Comparison out;
    out.same_support = cdf.points() == oracle_support;
    out.mass_error = std::abs(cdf.total_mass() - 1.0);
    for (double t : oracle_support) out.max_abs_diff = std::max(out.max_abs_diff, std::abs(cdf(t) - oracle_cdf(t)));
    for (std::size_t k = 0; k < cdf.size(); ++k)
        if (cdf.weights()[k] < 0.0) out.same_support = false;
    return out;
}

/// Runs every partial estimator on one area. Returns an empty string on
/// agreement, otherwise the name of the first disagreeing estimator.
inline std::string check_area(const oracle::Area& a, double c, double gamma) {
    using oracle::Kind;
    const auto e = residuals(a);
    // Any positive scale exercises the formulas; single units have no Qn.
    const double w = e.size() < 2 ? 1.0 : oracle::qn(e);
    if (!(w > 0.0)) return {};
    const std::span<const double> y(a.y), p(a.pred), r(e);
    struct Case {
        const char* name;
        Kind kind;
        sae::WeightedCdf cdf;
    };
    const Case cases[] = {
        {"naive", Kind::Naive, sae::cdf_naive(y, p)},
        {"cd", Kind::CD, sae::cdf_cd(y, p, r)},
        {"wr", Kind::WR, sae::cdf_wr(y, p, r, {c}, w)},
        {"bc", Kind::BC, sae::cdf_bc(y, p, r)},
        {"sbc", Kind::SBC, sae::cdf_sbc(y, p, r, {c}, w)},
        {"abc", Kind::ABC, sae::cdf_abc(y, p, r, {c, gamma}, w)},
    };
    for (const auto& cs : cases) {
        const auto cmp = compare(cs.cdf, oracle::support(a, cs.kind, c, gamma, w),
                                 [&](double t) { return oracle::cdf(a, cs.kind, t, c, gamma, w); });
        if (!cmp.ok()) return cs.name;
    }
    return {};
}

/// Full calibration of every area of a small collection against the pooled
/// oracle; areas without sampled units are allowed.
inline bool check_full(const std::vector<oracle::Area>& areas, double c, double gamma) {
    std::vector<double> pooled;
    for (const auto& a : areas) {
        const auto e = residuals(a);
        pooled.insert(pooled.end(), e.begin(), e.end());
    }
    const double w = oracle::qn(pooled);
    if (!(w > 0.0)) return true;
    for (std::size_t j = 0; j < areas.size(); ++j) {
        const auto& a = areas[j];
        if (a.y.empty() && a.pred.empty()) continue;
        const auto cdf = sae::cdf_full_abc(a.y, a.pred, pooled, {c, gamma}, w);
        const auto cmp = compare(cdf, oracle::support_full(areas, j, c, gamma, w),
                                 [&](double t) { return oracle::cdf_full(areas, j, t, c, gamma, w); });
        if (!cmp.ok()) return false;
    }
    return true;
}

}  // namespace tiny
