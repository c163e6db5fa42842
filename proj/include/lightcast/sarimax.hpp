#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcast/frame.hpp"
#include "lightcast/linalg.hpp"
#include "lightcast/nelder_mead.hpp"

namespace lightcast {

/// Seasonal ARMA orders with exogenous regressors. This artifact supports
/// p, q, P, Q in {0, 1} with no differencing.
struct SarimaxOrder {
    int p = 1;
    int d = 0;
    int q = 1;
    int P = 1;
    int D = 0;
    int Q = 1;
    int s = 24;

    void validate() const {
        if (d != 0 || D != 0) throw ValueError("sarimax: differencing is not supported");
        for (int v : {p, q, P, Q})
            if (v < 0 || v > 1) throw ValueError("sarimax: orders must be 0 or 1");
        if (s < 1) throw ValueError("sarimax: seasonal period must be >= 1");
    }

    /// Rows conditioned on before the innovation sum starts (max AR lag).
    int warmup() const { return p + s * P; }
};

/// Fitted regression-with-seasonal-ARMA-errors parameters, plus the residual
/// and innovation tails the forecast recursion starts from.
struct SarimaxParams {
    SarimaxOrder order;
    double c = 0;                   // regression constant
    double phi = 0;                 // non-seasonal AR
    double theta = 0;               // non-seasonal MA
    double seasonal_phi = 0;        // seasonal AR
    double seasonal_theta = 0;      // seasonal MA
    std::vector<double> beta;       // exogenous coefficients
    std::vector<std::string> exog;  // exogenous column names, aligned with beta
    double sigma2 = 0;              // innovation variance, CSS / n_effective
    double css = 0;
    std::vector<double> residual_tail;   // last s+1 regression residuals, oldest first
    std::vector<double> innovation_tail; // last s+1 innovations, oldest first
    bool converged = true;
    int iterations = 0;

    nlohmann::json to_json() const {
        return {{"schema", "lightcast.sarimax.v1"},
                {"order", {{"p", order.p}, {"d", order.d}, {"q", order.q}, {"P", order.P},
                           {"D", order.D}, {"Q", order.Q}, {"s", order.s}}},
                {"constant", c},
                {"phi", phi},
                {"theta", theta},
                {"seasonal_phi", seasonal_phi},
                {"seasonal_theta", seasonal_theta},
                {"beta", beta},
                {"exog", exog},
                {"sigma2", sigma2},
                {"css", css},
                {"residual_tail", residual_tail},
                {"innovation_tail", innovation_tail},
                {"converged", converged},
                {"iterations", iterations}};
    }

    static SarimaxParams from_json(const nlohmann::json& j) {
        SarimaxParams p;
        const auto& o = j.at("order");
        p.order = {o.at("p"), o.at("d"), o.at("q"), o.at("P"), o.at("D"), o.at("Q"), o.at("s")};
        p.c = j.at("constant");
        p.phi = j.at("phi");
        p.theta = j.at("theta");
        p.seasonal_phi = j.at("seasonal_phi");
        p.seasonal_theta = j.at("seasonal_theta");
        p.beta = j.at("beta").get<std::vector<double>>();
        p.exog = j.at("exog").get<std::vector<std::string>>();
        p.sigma2 = j.at("sigma2");
        p.css = j.at("css");
        p.residual_tail = j.at("residual_tail").get<std::vector<double>>();
        p.innovation_tail = j.at("innovation_tail").get<std::vector<double>>();
        p.converged = j.at("converged");
        p.iterations = j.at("iterations");
        return p;
    }
};

/// Weight of the coefficient shrinkage added to the CSS objective, in units of
/// the zero-coefficient innovation variance.
inline constexpr double kCoefficientShrink = 20.0;

namespace detail {

/// Innovation recursion for the multiplicative SARMA form
///   (1 - phi B)(1 - Phi B^s) r_t = (1 + theta B)(1 + Theta B^s) eps_t,
/// so the expansion carries cross terms at lag s+1. Innovations before the
/// warmup point are fixed at zero and the first `warmup` residuals are
/// conditioned on. Returns the full innovation series.
inline std::vector<double> sarma_innovations(const std::vector<double>& r, const SarimaxOrder& order,
                                             double phi, double theta, double seasonal_phi,
                                             double seasonal_theta) {
    const int n = static_cast<int>(r.size());
    const int s = order.s;
    const int warmup = order.warmup();
    std::vector<double> eps(r.size(), 0.0);
    auto r_at = [&](int t) { return t >= 0 ? r[static_cast<std::size_t>(t)] : 0.0; };
    auto e_at = [&](int t) { return t >= warmup ? eps[static_cast<std::size_t>(t)] : 0.0; };
    for (int t = warmup; t < n; ++t) {
        double value = r[static_cast<std::size_t>(t)];
        if (order.p) value -= phi * r_at(t - 1);
        if (order.P) value -= seasonal_phi * r_at(t - s);
        if (order.p && order.P) value += phi * seasonal_phi * r_at(t - s - 1);
        if (order.q) value -= theta * e_at(t - 1);
        if (order.Q) value -= seasonal_theta * e_at(t - s);
        if (order.q && order.Q) value -= theta * seasonal_theta * e_at(t - s - 1);
        eps[static_cast<std::size_t>(t)] = value;
    }
    return eps;
}

inline double sarma_css(const std::vector<double>& eps, int warmup) {
    double ssq = 0;
    for (std::size_t t = static_cast<std::size_t>(warmup); t < eps.size(); ++t) ssq += eps[t] * eps[t];
    return ssq;
}

} // namespace detail

/// Two-stage fit: (1) c and beta by OLS of y on [1, X]; (2) the seasonal ARMA
/// coefficients on the regression residuals by minimizing the conditional sum
/// of squared innovations with a Nelder-Mead simplex over tanh-transformed
/// coefficients, which enforces |coef| < 1.
inline SarimaxParams fit_sarimax(const SarimaxOrder& order, const TimeSeriesFrame& frame,
                                 const std::string& target, const std::vector<std::string>& exog,
                                 IndexRange train) {
    order.validate();
    if (train.size() < static_cast<std::size_t>(10 * order.s))
        throw ValueError("fit_sarimax: train range shorter than 10 seasonal periods");
    if (train.end > frame.rows()) throw ValueError("fit_sarimax: train range out of bounds");

    const std::size_t n = train.size();
    const std::size_t k = exog.size();
    Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(1 + k));
    Vector y(static_cast<Eigen::Index>(n));
    std::vector<std::size_t> exog_cols;
    for (const auto& name : exog) exog_cols.push_back(frame.column_index(name));
    const std::size_t tc = frame.column_index(target);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = train.begin + i;
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < k; ++j) X(i, static_cast<Eigen::Index>(j + 1)) = frame.at(row, exog_cols[j]);
        y(static_cast<Eigen::Index>(i)) = frame.at(row, tc);
    }
    const Vector ols = ridge_solve(X, y, Vector::Zero(X.cols())).coef;

    SarimaxParams params;
    params.order = order;
    params.exog = exog;
    params.c = ols(0);
    params.beta.assign(ols.data() + 1, ols.data() + 1 + k);

    std::vector<double> residuals(n);
    const Vector res = y - X * ols;
    for (std::size_t i = 0; i < n; ++i) residuals[i] = res(static_cast<Eigen::Index>(i));

    // active coefficients in the fixed order [phi, theta, Phi, Theta]
    const std::vector<int> active = {order.p, order.q, order.P, order.Q};
    const std::size_t n_active =
        static_cast<std::size_t>(active[0] + active[1] + active[2] + active[3]);

    auto unpack = [&](std::span<const double> raw, double out[4]) {
        std::size_t j = 0;
        for (int i = 0; i < 4; ++i) out[i] = active[static_cast<std::size_t>(i)] ? std::tanh(raw[j++]) : 0.0;
    };

    const int warmup = order.warmup();
    if (n_active > 0) {
        // Plain CSS is not identified under near-cancelling AR/MA factors (on
        // weakly autocorrelated residuals the (1-phi B)/(1+theta B) ridge is
        // almost flat), so the objective carries a small shrinkage term scaled
        // by the zero-coefficient innovation variance. The penalty vanishes at
        // the start point, which keeps CSS(returned) <= CSS(zero start).
        const double css_zero =
            detail::sarma_css(detail::sarma_innovations(residuals, order, 0, 0, 0, 0), warmup);
        const double shrink_unit =
            kCoefficientShrink * css_zero / static_cast<double>(residuals.size() - static_cast<std::size_t>(warmup));
        auto objective = [&](std::span<const double> raw) {
            double coef[4];
            unpack(raw, coef);
            const auto eps = detail::sarma_innovations(residuals, order, coef[0], coef[1], coef[2], coef[3]);
            double penalty = 0;
            for (double c : coef) penalty += c * c;
            return detail::sarma_css(eps, warmup) + shrink_unit * penalty;
        };
        const std::vector<double> start(n_active, 0.0);
        const NelderMeadResult opt = nelder_mead_minimize(objective, start);
        double coef[4];
        unpack(opt.x, coef);
        params.phi = coef[0];
        params.theta = coef[1];
        params.seasonal_phi = coef[2];
        params.seasonal_theta = coef[3];
        params.converged = opt.converged;
        params.iterations = opt.iterations;
    }

    const auto eps = detail::sarma_innovations(residuals, order, params.phi, params.theta,
                                               params.seasonal_phi, params.seasonal_theta);
    params.css = detail::sarma_css(eps, warmup);
    const std::size_t n_effective = n - static_cast<std::size_t>(warmup);
    params.sigma2 = params.css / static_cast<double>(n_effective);

    const std::size_t tail = static_cast<std::size_t>(order.s) + 1;
    const std::size_t keep = std::min(tail, n);
    params.residual_tail.assign(residuals.end() - static_cast<std::ptrdiff_t>(keep), residuals.end());
    params.innovation_tail.assign(eps.end() - static_cast<std::ptrdiff_t>(keep), eps.end());
    return params;
}

/// Iterates the fitted recursion forward with future innovations at zero and
/// forecasts substituting unknown residual lags. future_exog is row-major with
/// one row per step, columns aligned with params.exog.
inline std::vector<double> forecast_sarimax(const SarimaxParams& params, std::size_t horizon,
                                            const std::vector<double>& future_exog) {
    if (horizon < 1) throw ValueError("forecast_sarimax: horizon must be >= 1");
    const std::size_t k = params.exog.size();
    if (future_exog.size() != horizon * k)
        throw ValueError("forecast_sarimax: future exog rows do not match horizon");

    const int s = params.order.s;
    std::vector<double> r = params.residual_tail;   // oldest first, grows with forecasts
    std::vector<double> e = params.innovation_tail; // future innovations are zero
    auto lag = [](const std::vector<double>& v, int back) {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(v.size()) - back;
        return idx >= 0 ? v[static_cast<std::size_t>(idx)] : 0.0;
    };

    std::vector<double> forecast;
    forecast.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double rhat = 0;
        if (params.order.p) rhat += params.phi * lag(r, 1);
        if (params.order.P) rhat += params.seasonal_phi * lag(r, s);
        if (params.order.p && params.order.P) rhat -= params.phi * params.seasonal_phi * lag(r, s + 1);
        if (params.order.q) rhat += params.theta * lag(e, 1);
        if (params.order.Q) rhat += params.seasonal_theta * lag(e, s);
        if (params.order.q && params.order.Q)
            rhat += params.theta * params.seasonal_theta * lag(e, s + 1);
        r.push_back(rhat);
        e.push_back(0.0);

        double yhat = params.c + rhat;
        for (std::size_t j = 0; j < k; ++j) yhat += params.beta[j] * future_exog[h * k + j];
        forecast.push_back(yhat);
    }
    return forecast;
}

/// Re-anchors the forecast origin: reruns the innovation recursion over
/// [origin, through) with the fitted coefficients and observed data, and
/// returns a copy of the params whose residual/innovation tails end at
/// `through`. Forecasts then start right after that row.
inline SarimaxParams advance_sarimax_tails(const SarimaxParams& params, const TimeSeriesFrame& frame,
                                           const std::string& target, std::size_t origin,
                                           std::size_t through) {
    if (through > frame.rows() || origin >= through) throw ValueError("advance_sarimax_tails: bad range");
    const std::size_t tc = frame.column_index(target);
    std::vector<std::size_t> exog_cols;
    for (const auto& name : params.exog) exog_cols.push_back(frame.column_index(name));

    std::vector<double> residuals(through - origin);
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const std::size_t row = origin + i;
        double reg = params.c;
        for (std::size_t j = 0; j < exog_cols.size(); ++j)
            reg += params.beta[j] * frame.at(row, exog_cols[j]);
        residuals[i] = frame.at(row, tc) - reg;
    }
    const auto eps = detail::sarma_innovations(residuals, params.order, params.phi, params.theta,
                                               params.seasonal_phi, params.seasonal_theta);
    SarimaxParams advanced = params;
    const std::size_t tail = static_cast<std::size_t>(params.order.s) + 1;
    const std::size_t keep = std::min(tail, residuals.size());
    advanced.residual_tail.assign(residuals.end() - static_cast<std::ptrdiff_t>(keep), residuals.end());
    advanced.innovation_tail.assign(eps.end() - static_cast<std::ptrdiff_t>(keep), eps.end());
    return advanced;
}

/// One-step-ahead predictions over `rows`, with the innovation recursion
/// anchored at `origin` (the first training row). The first warmup() rows
/// after the origin are reproduced exactly by construction, so metrics should
/// start past them.
inline std::vector<double> sarimax_one_step(const SarimaxParams& params, const TimeSeriesFrame& frame,
                                            const std::string& target, std::size_t origin,
                                            IndexRange rows) {
    if (rows.begin < origin || rows.end > frame.rows()) throw ValueError("sarimax_one_step: bad row range");
    const std::size_t tc = frame.column_index(target);
    std::vector<std::size_t> exog_cols;
    for (const auto& name : params.exog) exog_cols.push_back(frame.column_index(name));

    const std::size_t n = rows.end - origin;
    std::vector<double> residuals(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t row = origin + i;
        double reg = params.c;
        for (std::size_t j = 0; j < exog_cols.size(); ++j)
            reg += params.beta[j] * frame.at(row, exog_cols[j]);
        residuals[i] = frame.at(row, tc) - reg;
    }
    const auto eps = detail::sarma_innovations(residuals, params.order, params.phi, params.theta,
                                               params.seasonal_phi, params.seasonal_theta);

    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t row = rows.begin; row < rows.end; ++row)
        out.push_back(frame.at(row, tc) - eps[row - origin]);
    return out;
}

} // namespace lightcast
