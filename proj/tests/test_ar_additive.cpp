#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "lightcast/ar_additive.hpp"
#include "lightcast/synthetic.hpp"

using namespace lightcast;

namespace {

TimeSeriesFrame series_frame(const std::vector<double>& y, std::int64_t start = 0) {
    std::vector<std::int64_t> ts(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        ts[i] = start + static_cast<std::int64_t>(i) * kSecondsPerHour;
    std::vector<double> values = y;
    return TimeSeriesFrame(std::move(ts), {"y"}, std::move(values));
}

ARAdditiveConfig lag_only_config(int n_lags) {
    ARAdditiveConfig c;
    c.base.n_changepoints = 0;
    c.base.seasonalities.clear();
    c.n_lags = n_lags;
    return c;
}

std::vector<double> simulate_ar1(double phi, std::size_t n, std::uint64_t seed) {
    GaussianSampler gauss(seed);
    std::vector<double> y(n);
    double prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
        prev = phi * prev + gauss.normal();
        y[i] = prev;
    }
    return y;
}

} // namespace

TEST_CASE("fit_ar_additive recovers an AR(1) coefficient") {
    auto frame = series_frame(simulate_ar1(0.8, 5000, 101));
    auto model = fit_ar_additive(lag_only_config(7), frame, "y", {0, 5000});
    REQUIRE(model.ar_coef.size() == 7);
    CHECK(model.ar_coef[0] == Catch::Approx(0.8).margin(0.05));
    for (std::size_t lag = 1; lag < 7; ++lag) CHECK(std::abs(model.ar_coef[lag]) < 0.1);
}

TEST_CASE("fit_ar_additive rejects a constant series") {
    auto frame = series_frame(std::vector<double>(300, 4.0));
    CHECK_THROWS_AS(fit_ar_additive(lag_only_config(1), frame, "y", {0, 300}), DataError);
}

TEST_CASE("ar coefficients vanish on a pure seasonal series with white noise") {
    const std::size_t n = 4000;
    GaussianSampler gauss(103);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = 10.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 168.0) + gauss.normal();
    auto frame = series_frame(y);
    ARAdditiveConfig config = lag_only_config(7);
    config.base.seasonalities = {{"weekly", 168.0, 3}};
    auto model = fit_ar_additive(config, frame, "y", {0, n});
    for (double coef : model.ar_coef) CHECK(std::abs(coef) < 0.05);
}

TEST_CASE("one-step-ahead prediction with horizon 1 equals the recursion") {
    auto y = simulate_ar1(0.7, 600, 107);
    auto frame = series_frame(y);
    auto model = fit_ar_additive(lag_only_config(3), frame, "y", {0, 599});

    auto one_step = predict_ar_one_step(model, frame, "y", {599, 600});
    auto history = frame.slice_rows({0, 599});
    auto future = frame.slice_rows({599, 600});
    auto recursive = predict_ar_additive(model, history, future, "y");
    REQUIRE(one_step.size() == 1);
    REQUIRE(recursive.size() == 1);
    CHECK(one_step[0] == Catch::Approx(recursive[0]).margin(1e-12));
}

TEST_CASE("a hand-built AR(1) model forecasts phi^h times the last value") {
    const double phi = 0.6;
    const double y0 = 5.0;
    ARAdditiveModel model;
    model.additive.config.n_changepoints = 0;
    model.additive.config.seasonalities.clear();
    model.additive.scale = {0.0, 1.0};
    model.additive.offset = 0.0;
    model.additive.slope = 0.0;
    model.ar_coef = {phi};

    std::vector<double> history_y = {y0};
    auto history = series_frame(history_y);
    std::vector<double> future_y(168, 0.0);
    auto future = series_frame(future_y, kSecondsPerHour);

    auto forecast = predict_ar_additive(model, history, future, "y");
    double expected = y0;
    for (std::size_t h = 0; h < 168; ++h) {
        expected *= phi;
        CHECK(forecast[h] == Catch::Approx(expected).margin(1e-10));
    }
}

TEST_CASE("zero ar coefficients reduce the model to the plain additive forecast") {
    auto frame = generate_synthetic({.n_rows = 1200, .seed = 109});
    AdditiveConfig base;
    base.n_changepoints = 5;
    base.seasonalities = {{"weekly", 168.0, 2}};
    base.regressors = {"co"};
    auto additive = fit_additive(base, frame, "pm2_5", {0, 1000});

    ARAdditiveModel model;
    model.additive = additive;
    model.ar_coef = std::vector<double>(7, 0.0);

    auto history = frame.slice_rows({0, 1000});
    auto future = frame.slice_rows({1000, 1200}).drop_column("pm2_5");
    auto ar_forecast = predict_ar_additive(model, history, future, "pm2_5");
    auto additive_forecast = predict_additive(additive, future, {0, future.rows()});
    CHECK(ar_forecast == additive_forecast); // bitwise: same design, same dot products
}

TEST_CASE("joint fit has one-step training RMSE no worse than the nested additive model") {
    auto frame = generate_synthetic({.n_rows = 3000, .seed = 113});
    ARAdditiveConfig config;
    config.base.n_changepoints = 5;
    config.base.seasonalities = {{"weekly", 168.0, 2}};
    config.n_lags = 7;
    auto ar_model = fit_ar_additive(config, frame, "pm2_5", {0, 3000});
    auto additive = fit_additive(config.base, frame, "pm2_5", {7, 3000});
    CHECK(ar_model.additive.sigma <= additive.sigma * (1.0 + 1e-9));
}

TEST_CASE("recursive forecast is deterministic") {
    auto frame = generate_synthetic({.n_rows = 1500, .seed = 127});
    ARAdditiveConfig config;
    config.base.seasonalities = {{"weekly", 168.0, 2}};
    config.base.n_changepoints = 3;
    config.n_lags = 7;
    auto model = fit_ar_additive(config, frame, "pm2_5", {0, 1332});
    auto history = frame.slice_rows({0, 1332});
    auto future = frame.slice_rows({1332, 1500}).drop_column("pm2_5");
    auto a = predict_ar_additive(model, history, future, "pm2_5");
    auto b = predict_ar_additive(model, history, future, "pm2_5");
    CHECK(a == b);
    CHECK(a.size() == 168);
}

TEST_CASE("lagged regressors enter the design and the recursion") {
    const std::size_t n = 2500;
    GaussianSampler gauss(131);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = gauss.normal();
    for (std::size_t i = 2; i < n; ++i)
        y[i] = 2.0 * x[i - 1] + 0.5 * y[i - 1] + 0.2 * gauss.normal();
    std::vector<std::int64_t> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = static_cast<std::int64_t>(i) * kSecondsPerHour;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        values.push_back(y[i]);
        values.push_back(x[i]);
    }
    TimeSeriesFrame frame(ts, {"y", "x"}, values);

    ARAdditiveConfig config = lag_only_config(2);
    config.base.regressors = {"x"};
    config.regressor_lags = 1;
    auto model = fit_ar_additive(config, frame, "y", {0, n});
    CHECK(model.lagged_regressor_coef.at("x")[0] == Catch::Approx(2.0).margin(0.1));
    CHECK(model.ar_coef[0] == Catch::Approx(0.5).margin(0.1));
}

TEST_CASE("fit_ar_additive validates lag counts") {
    auto frame = generate_synthetic({.n_rows = 50, .seed = 137});
    auto config = lag_only_config(40);
    CHECK_THROWS_AS(fit_ar_additive(config, frame, "pm2_5", {0, 42}), ValueError);
    ARAdditiveConfig bad = lag_only_config(0);
    CHECK_THROWS_AS(fit_ar_additive(bad, frame, "pm2_5", {0, 50}), ValueError);
}

TEST_CASE("ar model json round trip preserves forecasts") {
    auto frame = generate_synthetic({.n_rows = 1000, .seed = 139});
    ARAdditiveConfig config;
    config.base.seasonalities = {{"weekly", 168.0, 2}};
    config.base.n_changepoints = 0;
    config.base.regressors = {"co"};
    config.n_lags = 5;
    auto model = fit_ar_additive(config, frame, "pm2_5", {0, 832});
    auto restored = ARAdditiveModel::from_json(model.to_json());
    auto history = frame.slice_rows({0, 832});
    auto future = frame.slice_rows({832, 1000}).drop_column("pm2_5");
    CHECK(predict_ar_additive(restored, history, future, "pm2_5") ==
          predict_ar_additive(model, history, future, "pm2_5"));
}
