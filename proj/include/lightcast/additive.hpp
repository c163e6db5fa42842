#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcast/frame.hpp"
#include "lightcast/linalg.hpp"

namespace lightcast {

struct Seasonality {
    std::string name;
    double period_hours = 0;
    int fourier_order = 0;
};

/// Additive forecaster configuration: piecewise-linear trend with uniformly
/// spaced changepoints, Fourier seasonalities (weekly and yearly by default,
/// daily absent), and external regressors fitted by ridge least squares.
struct AdditiveConfig {
    int n_changepoints = 25;
    double changepoint_range = 0.8;            // fraction of the train span holding changepoints
    std::vector<Seasonality> seasonalities = {{"weekly", 168.0, 3}, {"yearly", 8766.0, 10}};
    std::vector<std::string> regressors;
    double trend_penalty = 10.0;               // ridge weight on changepoint deltas
    double regressor_penalty = 0.0;

    void validate() const {
        if (n_changepoints < 0) throw ValueError("n_changepoints must be >= 0");
        if (changepoint_range <= 0 || changepoint_range > 1)
            throw ValueError("changepoint_range must be in (0, 1]");
        for (const auto& s : seasonalities) {
            if (s.period_hours <= 0) throw ValueError("seasonality period must be positive");
            if (s.fourier_order < 1) throw ValueError("fourier_order must be >= 1");
        }
        if (trend_penalty < 0 || regressor_penalty < 0) throw ValueError("penalties must be >= 0");
    }
};

/// Linear map from absolute hour index to normalized time in [0, 1] over the
/// training span. Prediction rows beyond the span map above 1.
struct TimeScale {
    double hour0 = 0;
    double hour1 = 1;

    double normalize(double hour) const { return (hour - hour0) / (hour1 - hour0); }
};

inline double hour_index(std::int64_t ts) { return static_cast<double>(ts) / kSecondsPerHour; }

struct DesignMatrix {
    Matrix X;
    std::vector<std::string> column_names;
    // column layout: [intercept, t, changepoints..., seasonal pairs..., regressors...]
    std::size_t changepoint_offset = 0;
    std::size_t seasonal_offset = 0;
    std::size_t regressor_offset = 0;
};

/// Uniformly spaced changepoint locations (normalized time) over the first
/// changepoint_range fraction of the training span.
inline std::vector<double> uniform_changepoints(int n_changepoints, double changepoint_range) {
    std::vector<double> cps;
    cps.reserve(static_cast<std::size_t>(n_changepoints));
    for (int j = 1; j <= n_changepoints; ++j)
        cps.push_back(changepoint_range * static_cast<double>(j) / static_cast<double>(n_changepoints));
    return cps;
}

/// Columns: [1, t, relu(t - s_j) per changepoint, sin/cos(2 pi k H / period)
/// for k = 1..order per seasonality, regressor values]. H is the absolute hour
/// index of the row, t the normalized time. Regressors must be pre-scaled.
inline DesignMatrix build_design_matrix(const AdditiveConfig& config, const TimeSeriesFrame& frame,
                                        IndexRange rows, const TimeScale& scale,
                                        const std::vector<double>& changepoints) {
    config.validate();
    if (rows.empty() || rows.end > frame.rows()) throw ValueError("design matrix: empty or bad row range");

    std::size_t n_seasonal = 0;
    for (const auto& s : config.seasonalities) n_seasonal += 2 * static_cast<std::size_t>(s.fourier_order);
    const std::size_t n_cols = 2 + changepoints.size() + n_seasonal + config.regressors.size();

    DesignMatrix d;
    d.changepoint_offset = 2;
    d.seasonal_offset = 2 + changepoints.size();
    d.regressor_offset = d.seasonal_offset + n_seasonal;
    d.column_names.reserve(n_cols);
    d.column_names.push_back("intercept");
    d.column_names.push_back("trend");
    for (std::size_t j = 0; j < changepoints.size(); ++j)
        d.column_names.push_back("changepoint_" + std::to_string(j + 1));
    for (const auto& s : config.seasonalities)
        for (int k = 1; k <= s.fourier_order; ++k) {
            d.column_names.push_back(s.name + "_sin_" + std::to_string(k));
            d.column_names.push_back(s.name + "_cos_" + std::to_string(k));
        }
    for (const auto& r : config.regressors) d.column_names.push_back(r);

    std::vector<std::size_t> regressor_idx;
    regressor_idx.reserve(config.regressors.size());
    for (const auto& r : config.regressors) regressor_idx.push_back(frame.column_index(r));

    d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows.begin + i;
        const double hour = hour_index(frame.timestamps()[r]);
        const double t = scale.normalize(hour);
        Eigen::Index c = 0;
        d.X(i, c++) = 1.0;
        d.X(i, c++) = t;
        for (double s : changepoints) d.X(i, c++) = t > s ? t - s : 0.0;
        for (const auto& seas : config.seasonalities)
            for (int k = 1; k <= seas.fourier_order; ++k) {
                const double arg = 2.0 * std::numbers::pi * static_cast<double>(k) * hour / seas.period_hours;
                d.X(i, c++) = std::sin(arg);
                d.X(i, c++) = std::cos(arg);
            }
        for (std::size_t ri : regressor_idx) d.X(i, c++) = frame.at(r, ri);
    }
    return d;
}

/// Fitted additive decomposition: y(t) = trend + seasonal terms + regressor
/// effects, with the training residual RMSE kept as the noise scale.
struct AdditiveModel {
    AdditiveConfig config;
    TimeScale scale;
    std::vector<double> changepoints; // normalized time coordinates
    double offset = 0;                // m
    double slope = 0;                 // k
    std::vector<double> deltas;       // per-changepoint slope changes
    std::map<std::string, std::vector<double>> seasonal_coef; // 2 * order each
    std::vector<double> regressor_coef;                       // aligned with config.regressors
    double sigma = 0;
    bool jitter_applied = false;

    std::size_t design_width() const {
        std::size_t n = 2 + changepoints.size() + regressor_coef.size();
        for (const auto& [_, coefs] : seasonal_coef) n += coefs.size();
        return n;
    }

    Vector packed_coefficients() const {
        Vector w(static_cast<Eigen::Index>(design_width()));
        Eigen::Index c = 0;
        w(c++) = offset;
        w(c++) = slope;
        for (double d : deltas) w(c++) = d;
        for (const auto& s : config.seasonalities)
            for (double v : seasonal_coef.at(s.name)) w(c++) = v;
        for (double b : regressor_coef) w(c++) = b;
        return w;
    }

    /// Trend component alone, at a normalized time t.
    double trend_at(double t) const {
        double g = offset + slope * t;
        for (std::size_t j = 0; j < changepoints.size(); ++j)
            if (t > changepoints[j]) g += deltas[j] * (t - changepoints[j]);
        return g;
    }

    nlohmann::json to_json() const {
        nlohmann::json seas = nlohmann::json::array();
        for (const auto& s : config.seasonalities)
            seas.push_back({{"name", s.name},
                            {"period_hours", s.period_hours},
                            {"fourier_order", s.fourier_order},
                            {"coefficients", seasonal_coef.at(s.name)}});
        return {{"schema", "lightcast.additive.v1"},
                {"config",
                 {{"n_changepoints", config.n_changepoints},
                  {"changepoint_range", config.changepoint_range},
                  {"trend_penalty", config.trend_penalty},
                  {"regressor_penalty", config.regressor_penalty},
                  {"regressors", config.regressors}}},
                {"time_scale", {{"hour0", scale.hour0}, {"hour1", scale.hour1}}},
                {"trend", {{"offset", offset}, {"slope", slope}, {"changepoints", changepoints}, {"deltas", deltas}}},
                {"seasonalities", seas},
                {"regressor_coefficients", regressor_coef},
                {"sigma", sigma},
                {"jitter_applied", jitter_applied}};
    }

    static AdditiveModel from_json(const nlohmann::json& j) {
        AdditiveModel m;
        const auto& cfg = j.at("config");
        m.config.n_changepoints = cfg.at("n_changepoints").get<int>();
        m.config.changepoint_range = cfg.at("changepoint_range").get<double>();
        m.config.trend_penalty = cfg.at("trend_penalty").get<double>();
        m.config.regressor_penalty = cfg.at("regressor_penalty").get<double>();
        m.config.regressors = cfg.at("regressors").get<std::vector<std::string>>();
        m.config.seasonalities.clear();
        m.scale.hour0 = j.at("time_scale").at("hour0").get<double>();
        m.scale.hour1 = j.at("time_scale").at("hour1").get<double>();
        const auto& trend = j.at("trend");
        m.offset = trend.at("offset").get<double>();
        m.slope = trend.at("slope").get<double>();
        m.changepoints = trend.at("changepoints").get<std::vector<double>>();
        m.deltas = trend.at("deltas").get<std::vector<double>>();
        for (const auto& s : j.at("seasonalities")) {
            Seasonality spec{s.at("name").get<std::string>(), s.at("period_hours").get<double>(),
                             s.at("fourier_order").get<int>()};
            m.config.seasonalities.push_back(spec);
            m.seasonal_coef[spec.name] = s.at("coefficients").get<std::vector<double>>();
        }
        m.regressor_coef = j.at("regressor_coefficients").get<std::vector<double>>();
        m.sigma = j.at("sigma").get<double>();
        m.jitter_applied = j.at("jitter_applied").get<bool>();
        return m;
    }
};

namespace detail {

inline AdditiveModel unpack_additive(const AdditiveConfig& config, const TimeScale& scale,
                                     const std::vector<double>& changepoints, const Vector& w,
                                     bool jitter) {
    AdditiveModel m;
    m.config = config;
    m.scale = scale;
    m.changepoints = changepoints;
    Eigen::Index c = 0;
    m.offset = w(c++);
    m.slope = w(c++);
    m.deltas.reserve(changepoints.size());
    for (std::size_t j = 0; j < changepoints.size(); ++j) m.deltas.push_back(w(c++));
    for (const auto& s : config.seasonalities) {
        std::vector<double> coefs(2 * static_cast<std::size_t>(s.fourier_order));
        for (auto& v : coefs) v = w(c++);
        m.seasonal_coef[s.name] = std::move(coefs);
    }
    m.regressor_coef.reserve(config.regressors.size());
    for (std::size_t j = 0; j < config.regressors.size(); ++j) m.regressor_coef.push_back(w(c++));
    m.jitter_applied = jitter;
    return m;
}

/// Penalty layout shared by the plain and AR-extended fits: trend_penalty on
/// changepoint deltas, regressor_penalty on regressor columns, 0 elsewhere.
inline Vector additive_penalties(const AdditiveConfig& config, const DesignMatrix& d) {
    Vector penalty = Vector::Zero(d.X.cols());
    for (std::size_t j = d.changepoint_offset; j < d.seasonal_offset; ++j)
        penalty(static_cast<Eigen::Index>(j)) = config.trend_penalty;
    for (std::size_t j = d.regressor_offset; j < static_cast<std::size_t>(d.X.cols()); ++j)
        penalty(static_cast<Eigen::Index>(j)) = config.regressor_penalty;
    return penalty;
}

} // namespace detail

/// Ridge least-squares fit of the additive decomposition on the train range.
inline AdditiveModel fit_additive(const AdditiveConfig& config, const TimeSeriesFrame& frame,
                                  const std::string& target, IndexRange train) {
    config.validate();
    if (train.size() < 2) throw ValueError("fit_additive: train range too small");
    if (train.end > frame.rows()) throw ValueError("fit_additive: train range out of bounds");

    TimeScale scale{hour_index(frame.timestamps()[train.begin]),
                    hour_index(frame.timestamps()[train.end - 1])};
    const auto changepoints = uniform_changepoints(config.n_changepoints, config.changepoint_range);
    const DesignMatrix d = build_design_matrix(config, frame, train, scale, changepoints);
    if (train.size() <= static_cast<std::size_t>(d.X.cols()))
        throw ValueError("fit_additive: train length must exceed design width");

    const auto y_vec = frame.column_slice(target, train);
    const Vector y = Eigen::Map<const Vector>(y_vec.data(), static_cast<Eigen::Index>(y_vec.size()));

    const Vector penalty = detail::additive_penalties(config, d);
    RidgeSolution sol = ridge_solve(d.X, y, penalty);
    AdditiveModel m = detail::unpack_additive(config, scale, changepoints, sol.coef, sol.jitter_applied);
    m.sigma = std::sqrt((y - d.X * sol.coef).squaredNorm() / static_cast<double>(train.size()));
    return m;
}

/// Evaluates the fitted decomposition for the given rows. Regressor columns
/// must be present and scaled with the training scaler; the trend extrapolates
/// its final slope past the last changepoint.
inline std::vector<double> predict_additive(const AdditiveModel& model, const TimeSeriesFrame& frame,
                                            IndexRange rows) {
    const DesignMatrix d = build_design_matrix(model.config, frame, rows, model.scale, model.changepoints);
    const Vector w = model.packed_coefficients();
    std::vector<double> out;
    out.reserve(rows.size());
    for (Eigen::Index i = 0; i < d.X.rows(); ++i) out.push_back(d.X.row(i).dot(w));
    return out;
}

} // namespace lightcast
