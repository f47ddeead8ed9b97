#pragma once

// Brute-force reference implementations used only by the tests. They follow
// the textbook formulas literally and share no code with the library.

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

double huber(double r, double c);
double skewed_huber(double r, double c, double gamma);

double median(std::vector<double> v);
double mad(const std::vector<double>& v);                 // 1.4826 median |v|
double qn(const std::vector<double>& v);                  // 2.2219 * k-th pairwise difference; NaN if n < 2

/// Inputs of one small area for the indicator-sum CDFs.
struct Area {
    std::vector<double> y;       // observed outcomes
    std::vector<double> fitted;  // robust fitted values of the observed units
    std::vector<double> pred;    // point predictions of the unobserved units
};

enum class Kind { Naive, CD, WR, BC, SBC, ABC };

/// F(t) as the literal sum of indicators 1{. <= t} over all terms divided by
/// the denominator of the estimator.
double cdf(const Area& a, Kind kind, double t, double c = 0.0, double gamma = 1.0, double w = 1.0);

/// Pooled-residual estimator for area `target`: residuals of every area in
/// `areas` with one shared (c, gamma, w).
double cdf_full(const std::vector<Area>& areas, std::size_t target, double t, double c, double gamma, double w);

/// Materialised multiset of every indicator argument (the support before
/// merging) for the same estimators.
std::vector<double> support(const Area& a, Kind kind, double c = 0.0, double gamma = 1.0, double w = 1.0);
std::vector<double> support_full(const std::vector<Area>& areas, std::size_t target, double c, double gamma,
                                 double w);

/// Gini via mean absolute difference: sum |yi - yj| / (2 N^2 mu) + 1/N, which
/// equals 2 sum i y_(i) / (N^2 mu) - 1.
double gini_mad(const std::vector<double>& v);

/// Gini of a finite mixture sum_k m_k delta(x_k) by the double sum
/// I = sum_k x_k F(x_k) m_k with F inclusive; ties are merged first.
double gini_weighted(std::vector<double> x, std::vector<double> m);

/// Term-by-term transcription of the linearised calibrated Gini: sort the
/// combined vector, z by the rank formula, zhat at the fitted values by the
/// integral definition, Qn scale of the pseudo-residuals.
double if_gini(const Area& a, double c, double gamma);
double if_gini_full(const std::vector<Area>& areas, std::size_t target, double c, double gamma);

/// Two-piece skewed normal draws with Pr(e < 0) / Pr(e >= 0) = gamma^2:
/// -gamma |z| with probability gamma^2 / (1 + gamma^2), else |z| / gamma.
std::vector<double> two_piece_normal(double gamma, std::size_t n, std::uint64_t seed);

/// Classical ML fit of y = X beta + u_j + e by profiling sigma_e^2 out of
/// the likelihood and golden-section search over rho = sigma_u^2 / sigma_e^2.
struct MlFit {
    Eigen::VectorXd beta;
    double sigma_e2 = 0.0;
    double sigma_u2 = 0.0;
    std::vector<double> u;  // BLUP per area
};
MlFit ml_nested_error(const std::vector<Eigen::MatrixXd>& x, const std::vector<Eigen::VectorXd>& y);

/// Huber M-regression with scale 1.4826 median |r| re-estimated each step.
Eigen::VectorXd huber_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double c);

}  // namespace oracle
