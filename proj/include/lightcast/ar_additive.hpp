#pragma once

#include <deque>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcast/additive.hpp"

namespace lightcast {

/// Additive model extended with autoregressive target lags and, optionally,
/// lagged regressors. The AR part is linear, so the whole model is still one
/// ridge solve.
struct ARAdditiveConfig {
    AdditiveConfig base;
    int n_lags = 7;
    int regressor_lags = 0; // 0 = contemporaneous regressors only

    void validate() const {
        base.validate();
        if (n_lags < 1) throw ValueError("n_lags must be >= 1");
        if (regressor_lags < 0) throw ValueError("regressor_lags must be >= 0");
        if (regressor_lags > n_lags)
            throw ValueError("regressor_lags must not exceed n_lags");
    }
};

struct ARAdditiveModel {
    ARAdditiveModel() = default;

    AdditiveModel additive;                 // trend, seasonality, future regressors
    std::vector<double> ar_coef;            // weights on y(t-1) .. y(t-n_lags)
    std::map<std::string, std::vector<double>> lagged_regressor_coef; // per regressor, lags 1..L
    int regressor_lags = 0;

    int n_lags() const { return static_cast<int>(ar_coef.size()); }

    nlohmann::json to_json() const {
        nlohmann::json lagged = nlohmann::json::object();
        for (const auto& [name, coefs] : lagged_regressor_coef) lagged[name] = coefs;
        nlohmann::json j = additive.to_json();
        j["schema"] = "lightcast.ar_additive.v1";
        j["ar"] = {{"coefficients", ar_coef},
                   {"regressor_lags", regressor_lags},
                   {"lagged_regressor_coefficients", lagged}};
        return j;
    }

    static ARAdditiveModel from_json(const nlohmann::json& j) {
        ARAdditiveModel m;
        m.additive = AdditiveModel::from_json(j);
        const auto& ar = j.at("ar");
        m.ar_coef = ar.at("coefficients").get<std::vector<double>>();
        m.regressor_lags = ar.at("regressor_lags").get<int>();
        for (const auto& [name, coefs] : ar.at("lagged_regressor_coefficients").items())
            m.lagged_regressor_coef[name] = coefs.get<std::vector<double>>();
        return m;
    }
};

/// Joint ridge fit over [additive columns | y lags 1..n_lags | lagged
/// regressor columns]; the first n_lags train rows are dropped so every lag
/// is observed.
inline ARAdditiveModel fit_ar_additive(const ARAdditiveConfig& config, const TimeSeriesFrame& frame,
                                       const std::string& target, IndexRange train) {
    config.validate();
    const std::size_t n_lags = static_cast<std::size_t>(config.n_lags);
    if (train.size() <= n_lags + 1) throw ValueError("fit_ar_additive: insufficient rows after lag trimming");
    const IndexRange effective{train.begin + n_lags, train.end};

    const std::vector<double> y_full = frame.column_slice(target, {train.begin, train.end});
    {
        const double first = y_full.front();
        bool constant = true;
        for (double v : y_full)
            if (v != first) {
                constant = false;
                break;
            }
        if (constant)
            throw DataError("fit_ar_additive: constant target makes the lag columns degenerate");
    }

    TimeScale scale{hour_index(frame.timestamps()[train.begin]),
                    hour_index(frame.timestamps()[train.end - 1])};
    const auto changepoints = uniform_changepoints(config.base.n_changepoints, config.base.changepoint_range);
    const DesignMatrix base = build_design_matrix(config.base, frame, effective, scale, changepoints);

    const std::size_t n_rows = effective.size();
    const std::size_t n_lagged_reg =
        static_cast<std::size_t>(config.regressor_lags) * config.base.regressors.size();
    const std::size_t n_cols = static_cast<std::size_t>(base.X.cols()) + n_lags + n_lagged_reg;
    if (n_rows <= n_cols) throw ValueError("fit_ar_additive: insufficient rows after lag trimming");

    Matrix X(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    X.leftCols(base.X.cols()) = base.X;
    const std::size_t tc = frame.column_index(target);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const std::size_t row = effective.begin + i;
        Eigen::Index c = base.X.cols();
        for (std::size_t lag = 1; lag <= n_lags; ++lag) X(i, c++) = frame.at(row - lag, tc);
        for (const auto& reg : config.base.regressors) {
            const std::size_t rc = frame.column_index(reg);
            for (int lag = 1; lag <= config.regressor_lags; ++lag)
                X(i, c++) = frame.at(row - static_cast<std::size_t>(lag), rc);
        }
    }

    Vector y(static_cast<Eigen::Index>(n_rows));
    for (std::size_t i = 0; i < n_rows; ++i) y(static_cast<Eigen::Index>(i)) = y_full[n_lags + i];

    Vector penalty = Vector::Zero(X.cols());
    penalty.head(base.X.cols()) = detail::additive_penalties(config.base, base);

    RidgeSolution sol = ridge_solve(X, y, penalty);

    ARAdditiveModel m;
    m.additive = detail::unpack_additive(config.base, scale, changepoints, sol.coef.head(base.X.cols()),
                                         sol.jitter_applied);
    m.additive.sigma = std::sqrt((y - X * sol.coef).squaredNorm() / static_cast<double>(n_rows));
    Eigen::Index c = base.X.cols();
    m.ar_coef.reserve(n_lags);
    for (std::size_t lag = 0; lag < n_lags; ++lag) m.ar_coef.push_back(sol.coef(c++));
    m.regressor_lags = config.regressor_lags;
    for (const auto& reg : config.base.regressors) {
        std::vector<double> coefs;
        coefs.reserve(static_cast<std::size_t>(config.regressor_lags));
        for (int lag = 0; lag < config.regressor_lags; ++lag) coefs.push_back(sol.coef(c++));
        m.lagged_regressor_coef[reg] = std::move(coefs);
    }
    return m;
}

namespace detail {

/// One prediction step given the additive design row and the current lag window.
inline double ar_step(const ARAdditiveModel& model, const Matrix& design, const Vector& additive_coef,
                      std::size_t design_row, const std::deque<double>& target_lags,
                      const std::vector<std::deque<double>>& regressor_lags) {
    double yhat = design.row(static_cast<Eigen::Index>(design_row)).dot(additive_coef);
    for (std::size_t lag = 0; lag < model.ar_coef.size(); ++lag)
        yhat += model.ar_coef[lag] * target_lags[lag];
    for (std::size_t ri = 0; ri < model.additive.config.regressors.size(); ++ri) {
        const auto it = model.lagged_regressor_coef.find(model.additive.config.regressors[ri]);
        if (it == model.lagged_regressor_coef.end()) continue;
        for (std::size_t lag = 0; lag < it->second.size(); ++lag)
            yhat += it->second[lag] * regressor_lags[ri][lag];
    }
    return yhat;
}

} // namespace detail

/// Recursive multi-step forecast. `history` supplies the tail of observed
/// target values (unscaled) and, when lagged regressors are enabled, the
/// trailing scaled regressor rows; `future` supplies timestamps and scaled
/// regressor values for every forecast row. Forecast steps beyond the origin
/// feed their own predictions back as lags.
inline std::vector<double> predict_ar_additive(const ARAdditiveModel& model,
                                               const TimeSeriesFrame& history,
                                               const TimeSeriesFrame& future,
                                               const std::string& target) {
    const std::size_t n_lags = model.ar_coef.size();
    const std::size_t target_col = history.column_index(target);
    if (history.rows() < n_lags) throw ValueError("predict_ar_additive: history tail shorter than n_lags");
    if (history.rows() < static_cast<std::size_t>(model.regressor_lags))
        throw ValueError("predict_ar_additive: history tail shorter than regressor_lags");
    if (future.empty()) return {};
    if (future.timestamps().front() - history.timestamps().back() != kSecondsPerHour)
        throw ValueError("predict_ar_additive: future rows must continue the history grid");

    // lag windows, most recent first
    std::deque<double> target_lags;
    for (std::size_t lag = 1; lag <= n_lags; ++lag)
        target_lags.push_back(history.at(history.rows() - lag, target_col));
    std::vector<std::deque<double>> regressor_lags;
    for (const auto& reg : model.additive.config.regressors) {
        std::deque<double> window;
        const std::size_t rc = history.column_index(reg);
        for (int lag = 1; lag <= model.regressor_lags; ++lag)
            window.push_back(history.at(history.rows() - static_cast<std::size_t>(lag), rc));
        regressor_lags.push_back(std::move(window));
    }

    const DesignMatrix design = build_design_matrix(model.additive.config, future, {0, future.rows()},
                                                    model.additive.scale, model.additive.changepoints);
    std::vector<std::size_t> future_reg_cols;
    for (const auto& reg : model.additive.config.regressors)
        future_reg_cols.push_back(future.column_index(reg));

    const Vector additive_coef = model.additive.packed_coefficients();
    std::vector<double> forecast;
    forecast.reserve(future.rows());
    for (std::size_t h = 0; h < future.rows(); ++h) {
        const double yhat = detail::ar_step(model, design.X, additive_coef, h, target_lags, regressor_lags);
        forecast.push_back(yhat);
        target_lags.push_front(yhat);
        target_lags.pop_back();
        for (std::size_t ri = 0; ri < regressor_lags.size(); ++ri) {
            if (regressor_lags[ri].empty()) continue;
            regressor_lags[ri].push_front(future.at(h, future_reg_cols[ri]));
            regressor_lags[ri].pop_back();
        }
    }
    return forecast;
}

/// One-step-ahead predictions over rows of a frame that contains the observed
/// target: every lag is read from the data, nothing is fed back. Used for
/// train/val metrics.
inline std::vector<double> predict_ar_one_step(const ARAdditiveModel& model, const TimeSeriesFrame& frame,
                                               const std::string& target, IndexRange rows) {
    const std::size_t n_lags = model.ar_coef.size();
    const std::size_t max_lag =
        std::max(n_lags, static_cast<std::size_t>(model.regressor_lags));
    if (rows.begin < max_lag) throw ValueError("predict_ar_one_step: rows must leave room for lags");

    const DesignMatrix design = build_design_matrix(model.additive.config, frame, rows,
                                                    model.additive.scale, model.additive.changepoints);
    const std::size_t tc = frame.column_index(target);
    std::vector<std::size_t> reg_cols;
    for (const auto& reg : model.additive.config.regressors) reg_cols.push_back(frame.column_index(reg));

    const Vector additive_coef = model.additive.packed_coefficients();
    std::vector<double> out;
    out.reserve(rows.size());
    std::deque<double> target_lags;
    std::vector<std::deque<double>> regressor_lags(reg_cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t row = rows.begin + i;
        target_lags.clear();
        for (std::size_t lag = 1; lag <= n_lags; ++lag) target_lags.push_back(frame.at(row - lag, tc));
        for (std::size_t ri = 0; ri < reg_cols.size(); ++ri) {
            regressor_lags[ri].clear();
            for (int lag = 1; lag <= model.regressor_lags; ++lag)
                regressor_lags[ri].push_back(frame.at(row - static_cast<std::size_t>(lag), reg_cols[ri]));
        }
        out.push_back(detail::ar_step(model, design.X, additive_coef, i, target_lags, regressor_lags));
    }
    return out;
}

} // namespace lightcast
