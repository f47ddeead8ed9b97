#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sae/data.hpp"
#include "sae/psi.hpp"

namespace sae {

enum class FitKind { Reblup, MQuantile };

struct FitDiagnostics {
    int iterations = 0;
    bool converged = false;
    bool variance_clamped = false;  // a variance iterate went negative and was set to 0
    bool degenerate = false;        // residuals vanished; sigma_e reported as 0
};

struct ReblupOptions {
    HuberConfig huber{1.345};
    double tol = 1e-6;
    int max_iter = 200;
    /// Hold (sigma_e^2, sigma_u^2) fixed and only solve for beta and u.
    std::optional<std::pair<double, double>> fixed_variances;
};

struct MQuantileOptions {
    HuberConfig huber{1.345};
    std::vector<double> grid = default_grid();
    double tol = 1e-10;
    int max_iter = 5000;  // the joint beta-scale fixed point can contract slowly

    /// {0.01, 0.02, ..., 0.99}
    static std::vector<double> default_grid();
};

/// Parameters of a fitted nested-error model (REBLUP) or of an M-quantile
/// fit. Immutable once returned by a fitter.
struct FittedModel {
    FitKind kind = FitKind::Reblup;
    Vector beta;             // REBLUP fixed effects; MQ: the q = 0.5 plane
    double sigma_u = 0.0;
    double sigma_e = 0.0;
    std::map<int, double> u;  // predicted area effects (REBLUP)

    std::map<int, double> theta;       // area quantile index (MQ)
    std::map<int, Vector> area_beta;   // coefficients of the theta_j plane (MQ)
    Vector out_of_sample_beta;         // MQ plane used for unsampled areas

    FitDiagnostics diagnostics;

    /// Area effect applied to predictions: u_j for sampled areas, the median
    /// of the predicted effects otherwise. REBLUP only.
    double area_effect(int area_id) const;
    /// Linear predictor coefficients for an area (intercept absorbs u_j).
    Vector area_coefficients(int area_id) const;
    bool knows_area(int area_id) const;
};

using AreaResiduals = std::map<int, Vector>;

/// Robust EBLUP fit of y_ij = x_ij'beta + u_j + e_ij with Huber-bounded
/// maximum-likelihood estimating equations and Fellner-type area effects.
FittedModel fit_reblup(const SurveyData& data, const ReblupOptions& options = {});

/// M-quantile fit over a quantile grid; areas are summarised by the mean
/// unit-level quantile index theta_j.
FittedModel fit_mq(const SurveyData& data, const MQuantileOptions& options = {});

/// Single M-quantile regression plane at level q (IRLS, MAD scale about 0).
Vector fit_mq_plane(const Matrix& x, const Vector& y, double q, const MQuantileOptions& options,
                    const Vector* start = nullptr);

/// y_ij - yhat_ij for every sampled area.
AreaResiduals residuals(const FittedModel& model, const SurveyData& data);

/// Robust fitted values of the sampled units of an area.
Vector fitted_values(const FittedModel& model, const AreaData& area);

/// Robust predictions for the N_j - n_j non-sampled units of an area.
Vector predict_unsampled(const FittedModel& model, const SurveyData& data, int area_id);
Vector predict_unsampled(const FittedModel& model, const AreaData& area);

/// E[psi_c(Z)^2] for Z ~ N(0, 1).
double huber_consistency(double c);

}  // namespace sae
