#include "sae/robust_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sae/error.hpp"

namespace sae {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double huber_weight(double r, double c) {
    const double a = std::abs(r);
    return a <= c ? 1.0 : c / a;
}

double max_rel_change(const Vector& next, const Vector& prev) {
    return ((next - prev).array().abs() / (1.0 + prev.array().abs())).maxCoeff();
}

// Sampled part of the data stacked into one design.
struct Stacked {
    Matrix x;
    Vector y;
    std::vector<int> ids;
    std::vector<Eigen::Index> offset;  // size = areas + 1
    std::vector<Eigen::Index> size;
};

Stacked stack_sample(const SurveyData& data) {
    Stacked s;
    const auto n = static_cast<Eigen::Index>(data.total_sample_size());
    if (n == 0) throw InputError("sample contains no observed units");
    s.x.resize(n, data.p);
    s.y.resize(n);
    Eigen::Index row = 0;
    for (const auto& a : data.areas) {
        if (!a.is_sampled()) continue;
        const auto nj = static_cast<Eigen::Index>(a.sample_size());
        s.ids.push_back(a.id);
        s.offset.push_back(row);
        s.size.push_back(nj);
        s.x.middleRows(row, nj) = a.x_sampled;
        s.y.segment(row, nj) = a.y_sampled;
        row += nj;
    }
    s.offset.push_back(row);
    return s;
}

Vector ols(const Matrix& x, const Vector& y) {
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < x.cols()) throw InputError("rank-deficient design matrix");
    return qr.solve(y);
}

struct Variances {
    double e;  // sigma_e^2
    double u;  // sigma_u^2
};

Variances moment_start(const Stacked& s, const Vector& resid) {
    const auto n = static_cast<double>(resid.size());
    double within = 0.0;
    double between = 0.0;
    for (std::size_t j = 0; j < s.ids.size(); ++j) {
        auto seg = resid.segment(s.offset[j], s.size[j]);
        const double m = seg.mean();
        within += (seg.array() - m).square().sum();
        between += static_cast<double>(s.size[j]) * m * m;
    }
    const double dof = n - static_cast<double>(s.ids.size());
    double se2 = dof > 0.0 ? within / dof : resid.squaredNorm() / n;
    if (!(se2 > 0.0)) se2 = resid.squaredNorm() / n;
    const double nbar = n / static_cast<double>(s.ids.size());
    const double su2 = std::max(between / n - se2 / nbar, 1e-3 * se2);
    return {se2, su2};
}

// beta solving the Huber-bounded GLS equations for fixed variances (IRLS).
Vector solve_beta(const Stacked& s, const Vector& start, Variances v, double c, double tol, int max_iter) {
    Vector beta = start;
    const double scale = std::sqrt(v.e + v.u);
    const auto p = s.x.cols();
    for (int it = 0; it < max_iter; ++it) {
        Matrix lhs = Matrix::Zero(p, p);
        Vector rhs = Vector::Zero(p);
        for (std::size_t j = 0; j < s.ids.size(); ++j) {
            const auto nj = s.size[j];
            const auto xj = s.x.middleRows(s.offset[j], nj);
            const auto yj = s.y.segment(s.offset[j], nj);
            const Vector r = (yj - xj * beta) / scale;
            Vector w(nj);
            for (Eigen::Index i = 0; i < nj; ++i) w[i] = huber_weight(r[i], c);
            const double g = v.u / (v.e + static_cast<double>(nj) * v.u);
            // V^{-1} W X and V^{-1} W y with V^{-1} = (I - g J) / sigma_e^2
            Matrix wx = w.asDiagonal() * xj;
            Vector wy = w.asDiagonal() * yj;
            const Eigen::RowVectorXd colsum = wx.colwise().sum();
            wx.rowwise() -= g * colsum;
            wy.array() -= g * wy.sum();
            lhs.noalias() += xj.transpose() * wx;
            rhs.noalias() += xj.transpose() * wy;
        }
        Vector next = lhs.partialPivLu().solve(rhs);
        const double change = max_rel_change(next, beta);
        beta = std::move(next);
        if (change < tol) break;
    }
    return beta;
}

// One fixed-point step of the bounded variance-component equations.
Variances update_variances(const Stacked& s, const Vector& beta, Variances v, double c, double k,
                           bool& clamped) {
    const double scale2 = v.e + v.u;
    const double scale = std::sqrt(scale2);
    double a_e = 0.0, a_u = 0.0;
    double m_ee = 0.0, m_eu = 0.0, m_uu = 0.0;
    for (std::size_t j = 0; j < s.ids.size(); ++j) {
        const auto nj = s.size[j];
        const double n = static_cast<double>(nj);
        const auto xj = s.x.middleRows(s.offset[j], nj);
        const auto yj = s.y.segment(s.offset[j], nj);
        Vector psi = ((yj - xj * beta) / scale).unaryExpr([c](double r) { return std::clamp(r, -c, c); });
        const double g = v.u / (v.e + n * v.u);
        Vector q = (psi.array() - g * psi.sum()) / v.e;  // V^{-1} psi
        a_e += scale2 * q.squaredNorm();
        const double qs = q.sum();
        a_u += scale2 * qs * qs;
        const double lam = v.e + n * v.u;
        m_ee += (n - 1.0) / (v.e * v.e) + 1.0 / (lam * lam);
        m_eu += n / (lam * lam);
        m_uu += n * n / (lam * lam);
    }
    m_ee *= k;
    m_eu *= k;
    m_uu *= k;
    const double det = m_ee * m_uu - m_eu * m_eu;
    Variances next{};
    if (std::abs(det) > 0.0) {
        next.e = (m_uu * a_e - m_eu * a_u) / det;
        next.u = (m_ee * a_u - m_eu * a_e) / det;
    } else {
        next = {a_e / m_ee, 0.0};
    }
    if (next.u < 0.0) {
        clamped = true;
        next.u = 0.0;
        next.e = a_e / m_ee;
    }
    if (!(next.e > 0.0)) throw NumericalError("error variance iterate collapsed to zero");
    return next;
}

// Fellner-type robust prediction of one area effect given beta and variances.
double solve_area_effect(const Vector& e, Variances v, double c, double tol, int max_iter) {
    if (v.u <= 0.0) return 0.0;
    const double se = std::sqrt(v.e);
    const double su = std::sqrt(v.u);
    const double n = static_cast<double>(e.size());
    double u = v.u * e.sum() / (v.e + n * v.u);
    for (int it = 0; it < max_iter; ++it) {
        double sw = 0.0, swe = 0.0;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            const double w = huber_weight((e[i] - u) / se, c);
            sw += w;
            swe += w * e[i];
        }
        const double wu = huber_weight(u / su, c);
        const double next = swe / (sw + wu * v.e / v.u);
        const double change = std::abs(next - u);
        u = next;
        if (change < tol * (1.0 + std::abs(u))) break;
    }
    return u;
}

}  // namespace

double huber_consistency(double c) {
    const double phi = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
    const double big_phi = normal_cdf(c);
    return 2.0 * big_phi - 1.0 - 2.0 * c * phi + 2.0 * c * c * (1.0 - big_phi);
}

double FittedModel::area_effect(int area_id) const {
    if (auto it = u.find(area_id); it != u.end()) return it->second;
    if (u.empty()) return 0.0;
    std::vector<double> effects;
    effects.reserve(u.size());
    for (const auto& [id, value] : u) effects.push_back(value);
    return median(std::move(effects));
}

Vector FittedModel::area_coefficients(int area_id) const {
    if (kind == FitKind::MQuantile) {
        if (auto it = area_beta.find(area_id); it != area_beta.end()) return it->second;
        return out_of_sample_beta;
    }
    Vector coef = beta;
    coef[0] += area_effect(area_id);
    return coef;
}

bool FittedModel::knows_area(int area_id) const {
    return kind == FitKind::MQuantile ? area_beta.contains(area_id) : u.contains(area_id);
}

FittedModel fit_reblup(const SurveyData& data, const ReblupOptions& options) {
    options.huber.validate();
    const Stacked s = stack_sample(data);
    const double c = options.huber.c;

    FittedModel model;
    model.kind = FitKind::Reblup;
    Vector beta = ols(s.x, s.y);
    const Vector resid0 = s.y - s.x * beta;
    const double ymag = std::max(1.0, s.y.cwiseAbs().maxCoeff());
    if (resid0.cwiseAbs().maxCoeff() <= 1e-12 * ymag) {
        model.beta = beta;
        for (int id : s.ids) model.u[id] = 0.0;
        model.diagnostics = {0, true, false, true};
        return model;
    }

    const double k = huber_consistency(c);
    Variances v = options.fixed_variances
                      ? Variances{options.fixed_variances->first, options.fixed_variances->second}
                      : moment_start(s, resid0);
    FitDiagnostics diag;
    const int inner_iter = 100;
    for (int it = 1; it <= options.max_iter; ++it) {
        diag.iterations = it;
        Vector next_beta = solve_beta(s, beta, v, c, 0.1 * options.tol, inner_iter);
        double change = max_rel_change(next_beta, beta);
        beta = std::move(next_beta);
        if (!options.fixed_variances) {
            const Variances next = update_variances(s, beta, v, c, k, diag.variance_clamped);
            const double tiny = 1e-12 * (v.e + v.u);
            change = std::max({change, std::abs(next.e - v.e) / std::max(v.e, tiny),
                               std::abs(next.u - v.u) / std::max(v.u, std::max(next.u, tiny))});
            v = next;
        }
        if (change < options.tol) {
            diag.converged = true;
            break;
        }
    }
    model.beta = beta;
    model.sigma_e = std::sqrt(v.e);
    model.sigma_u = std::sqrt(v.u);
    for (std::size_t j = 0; j < s.ids.size(); ++j) {
        const auto xj = s.x.middleRows(s.offset[j], s.size[j]);
        const Vector e = s.y.segment(s.offset[j], s.size[j]) - xj * beta;
        model.u[s.ids[j]] = solve_area_effect(e, v, c, 1e-10, 500);
    }
    model.diagnostics = diag;
    return model;
}

std::vector<double> MQuantileOptions::default_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 99; ++k) grid.push_back(k / 100.0);
    return grid;
}

Vector fit_mq_plane(const Matrix& x, const Vector& y, double q, const MQuantileOptions& options,
                    const Vector* start) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("M-quantile level must lie in (0, 1)");
    const double c = options.huber.c;
    Vector beta = start ? *start : ols(x, y);
    for (int it = 0; it < options.max_iter; ++it) {
        const Vector r = y - x * beta;
        std::vector<double> absr(static_cast<std::size_t>(r.size()));
        for (Eigen::Index i = 0; i < r.size(); ++i) absr[static_cast<std::size_t>(i)] = std::abs(r[i]);
        const double s = kMadConsistency * median(std::move(absr));
        if (!(s > 0.0)) return beta;  // interpolating fit
        Vector w(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            const double t = r[i] / s;
            w[i] = 2.0 * (t > 0.0 ? q : 1.0 - q) * huber_weight(t, c);
        }
        const Matrix xtw = x.transpose() * w.asDiagonal();
        Vector next = (xtw * x).ldlt().solve(xtw * y);
        const double change = max_rel_change(next, beta);
        beta = std::move(next);
        if (change < options.tol) return beta;
    }
    throw ConvergenceError("M-quantile IRLS did not converge at q=" + std::to_string(q));
}

FittedModel fit_mq(const SurveyData& data, const MQuantileOptions& options) {
    options.huber.validate();
    const auto& grid = options.grid;
    if (grid.empty()) throw InputError("M-quantile grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() <= 0.0 || grid.back() >= 1.0)
        throw InputError("M-quantile grid must be sorted inside (0, 1)");
    const auto mid = std::find(grid.begin(), grid.end(), 0.5);
    if (mid == grid.end()) throw InputError("M-quantile grid must contain 0.5");

    const Stacked s = stack_sample(data);
    const auto g = grid.size();
    std::vector<Vector> planes(g);
    // Warm-start outwards from the median plane.
    const auto m = static_cast<std::size_t>(mid - grid.begin());
    planes[m] = fit_mq_plane(s.x, s.y, grid[m], options);
    for (std::size_t i = m; i-- > 0;) planes[i] = fit_mq_plane(s.x, s.y, grid[i], options, &planes[i + 1]);
    for (std::size_t i = m + 1; i < g; ++i) planes[i] = fit_mq_plane(s.x, s.y, grid[i], options, &planes[i - 1]);

    const double q_lo = grid.front();
    const double q_hi = grid.back();
    auto unit_q = [&](const Eigen::RowVectorXd& xi, double yi) {
        std::vector<double> f(g);
        for (std::size_t k = 0; k < g; ++k) f[k] = xi.dot(planes[k]);
        for (std::size_t k = 0; k < g; ++k)
            if (yi == f[k]) return grid[k];
        if (yi < f.front()) return q_lo;
        if (yi > f.back()) return q_hi;
        for (std::size_t k = 0; k + 1 < g; ++k) {
            const double a = f[k], b = f[k + 1];
            if ((a < yi && yi < b) || (b < yi && yi < a))
                return grid[k] + (yi - a) / (b - a) * (grid[k + 1] - grid[k]);
        }
        return yi < f[m] ? q_lo : q_hi;
    };

    FittedModel model;
    model.kind = FitKind::MQuantile;
    model.beta = planes[m];
    std::vector<double> thetas;
    for (std::size_t j = 0; j < s.ids.size(); ++j) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < s.size[j]; ++i) {
            const auto row = s.offset[j] + i;
            total += unit_q(s.x.row(row), s.y[row]);
        }
        const double theta = total / static_cast<double>(s.size[j]);
        model.theta[s.ids[j]] = theta;
        thetas.push_back(theta);
    }
    for (const auto& [id, theta] : model.theta)
        model.area_beta[id] = fit_mq_plane(s.x, s.y, theta, options, &planes[m]);
    model.out_of_sample_beta = fit_mq_plane(s.x, s.y, median(thetas), options, &planes[m]);
    model.diagnostics.converged = true;
    model.diagnostics.iterations = static_cast<int>(g);
    return model;
}

Vector fitted_values(const FittedModel& model, const AreaData& area) {
    if (!area.is_sampled()) return {};
    if (!model.knows_area(area.id))
        throw InputError("area " + std::to_string(area.id) + " is unknown to the fitted model");
    if (model.kind == FitKind::MQuantile) return area.x_sampled * model.area_coefficients(area.id);
    return (area.x_sampled * model.beta).array() + model.area_effect(area.id);
}

AreaResiduals residuals(const FittedModel& model, const SurveyData& data) {
    AreaResiduals out;
    for (const auto& a : data.areas) {
        if (!a.is_sampled()) continue;
        out[a.id] = a.y_sampled - fitted_values(model, a);
    }
    return out;
}

Vector predict_unsampled(const FittedModel& model, const AreaData& area) {
    if (area.unsampled_size() == 0) return Vector(0);
    if (model.kind == FitKind::MQuantile) return area.x_unsampled * model.area_coefficients(area.id);
    return (area.x_unsampled * model.beta).array() + model.area_effect(area.id);
}

Vector predict_unsampled(const FittedModel& model, const SurveyData& data, int area_id) {
    return predict_unsampled(model, data.area(area_id));
}

}  // namespace sae
