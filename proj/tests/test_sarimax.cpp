#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lightcast/sarimax.hpp"
#include "lightcast/synthetic.hpp"

using namespace lightcast;

namespace {

TimeSeriesFrame columns_frame(const std::vector<std::string>& names,
                              const std::vector<std::vector<double>>& cols) {
    const std::size_t n = cols[0].size();
    std::vector<std::int64_t> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = static_cast<std::int64_t>(i) * kSecondsPerHour;
    std::vector<double> values;
    values.reserve(n * names.size());
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& col : cols) values.push_back(col[i]);
    return TimeSeriesFrame(std::move(ts), names, std::move(values));
}

} // namespace

TEST_CASE("sarimax order validation") {
    CHECK_THROWS_AS((SarimaxOrder{2, 0, 1, 1, 0, 1, 24}).validate(), ValueError);
    CHECK_THROWS_AS((SarimaxOrder{1, 1, 1, 1, 0, 1, 24}).validate(), ValueError);
    CHECK_THROWS_AS((SarimaxOrder{1, 0, 1, 1, 0, 1, 0}).validate(), ValueError);
    CHECK((SarimaxOrder{1, 0, 1, 1, 0, 1, 24}).warmup() == 25);
}

TEST_CASE("white-noise target yields near-zero ARMA coefficients") {
    GaussianSampler gauss(211);
    std::vector<double> y(5000);
    for (auto& v : y) v = gauss.normal();
    auto frame = columns_frame({"y"}, {y});
    auto params = fit_sarimax({1, 0, 1, 1, 0, 1, 24}, frame, "y", {}, {0, 5000});
    CHECK(std::abs(params.phi) < 0.1);
    CHECK(std::abs(params.theta) < 0.1);
    CHECK(std::abs(params.seasonal_phi) < 0.1);
    CHECK(std::abs(params.seasonal_theta) < 0.1);
    CHECK(params.sigma2 == Catch::Approx(1.0).epsilon(0.1));
}

TEST_CASE("simulate-and-recover: regression with ARMA(1,1) errors") {
    const std::size_t n = 5000;
    GaussianSampler gauss(223);
    std::vector<double> x(n), y(n);
    double prev_noise = 0, prev_eps = 0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = gauss.normal();
        const double eps = gauss.normal();
        const double noise = 0.6 * prev_noise + eps + 0.3 * prev_eps;
        prev_noise = noise;
        prev_eps = eps;
        y[i] = 2.0 * x[i] + noise;
    }
    auto frame = columns_frame({"y", "x"}, {y, x});
    auto params = fit_sarimax({1, 0, 1, 0, 0, 0, 24}, frame, "y", {"x"}, {0, n});
    CHECK(params.beta[0] == Catch::Approx(2.0).margin(0.05));
    CHECK(params.phi == Catch::Approx(0.6).margin(0.15));
    CHECK(params.theta == Catch::Approx(0.3).margin(0.15));
}

TEST_CASE("simulate-and-recover: pure seasonal AR") {
    const std::size_t n = 5000;
    const int s = 24;
    GaussianSampler gauss(227);
    std::vector<double> y(n + 500, 0.0);
    for (std::size_t i = static_cast<std::size_t>(s); i < y.size(); ++i)
        y[i] = 0.7 * y[i - static_cast<std::size_t>(s)] + gauss.normal();
    y.erase(y.begin(), y.begin() + 500); // burn-in
    auto frame = columns_frame({"y"}, {y});
    auto params = fit_sarimax({1, 0, 1, 1, 0, 1, s}, frame, "y", {}, {0, n});
    CHECK(params.seasonal_phi == Catch::Approx(0.7).margin(0.15));
    CHECK(std::abs(params.phi) < 0.15);
}

TEST_CASE("optimizer never worsens the zero-coefficient start") {
    auto frame = generate_synthetic({.n_rows = 2000, .seed = 229});
    const IndexRange train{0, 2000};
    auto params = fit_sarimax({1, 0, 1, 1, 0, 1, 24}, frame, "pm2_5", {"co"}, train);

    // CSS at the zero start = sum of squared residuals past the warmup
    const auto y = frame.column_slice("pm2_5", train);
    const auto x = frame.column_slice("co", train);
    std::vector<double> resid(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - params.c - params.beta[0] * x[i];
    double css0 = 0;
    for (std::size_t i = static_cast<std::size_t>(params.order.warmup()); i < resid.size(); ++i)
        css0 += resid[i] * resid[i];
    CHECK(params.css <= css0);
}

TEST_CASE("fit is deterministic") {
    auto frame = generate_synthetic({.n_rows = 1000, .seed = 233});
    auto a = fit_sarimax({1, 0, 1, 1, 0, 1, 24}, frame, "pm2_5", {"co"}, {0, 1000});
    auto b = fit_sarimax({1, 0, 1, 1, 0, 1, 24}, frame, "pm2_5", {"co"}, {0, 1000});
    CHECK(a.phi == b.phi);
    CHECK(a.theta == b.theta);
    CHECK(a.seasonal_phi == b.seasonal_phi);
    CHECK(a.seasonal_theta == b.seasonal_theta);
    CHECK(a.beta == b.beta);
    CHECK(a.css == b.css);
}

TEST_CASE("forecast with zero ARMA coefficients is the pure regression") {
    SarimaxParams params;
    params.order = {1, 0, 1, 1, 0, 1, 4};
    params.c = 1.5;
    params.beta = {2.0};
    params.exog = {"x"};
    params.residual_tail = std::vector<double>(5, 3.0);
    params.innovation_tail = std::vector<double>(5, 1.0);

    const std::vector<double> future_exog = {1.0, 2.0, 3.0};
    auto f = forecast_sarimax(params, 3, future_exog);
    CHECK(f[0] == 1.5 + 2.0 * 1.0);
    CHECK(f[1] == 1.5 + 2.0 * 2.0);
    CHECK(f[2] == 1.5 + 2.0 * 3.0);
}

TEST_CASE("forecast with zero coefficients and no exog is identically the constant") {
    SarimaxParams params;
    params.order = {1, 0, 1, 1, 0, 1, 24};
    params.c = 7.25;
    params.residual_tail = std::vector<double>(25, 2.0);
    params.innovation_tail = std::vector<double>(25, 1.0);
    auto f = forecast_sarimax(params, 10, {});
    for (double v : f) CHECK(v == 7.25);
}

TEST_CASE("AR-only forecast decays the last residual geometrically") {
    const double phi = 0.8;
    const double r0 = 4.0;
    SarimaxParams params;
    params.order = {1, 0, 0, 0, 0, 0, 24};
    params.phi = phi;
    params.residual_tail = {r0};
    params.innovation_tail = {0.5};
    auto f = forecast_sarimax(params, 20, {});
    double expected = r0;
    for (std::size_t h = 0; h < 20; ++h) {
        expected *= phi;
        CHECK(f[h] == Catch::Approx(expected).margin(1e-10));
    }
}

TEST_CASE("horizon-1 MA-only forecast is c + beta x + theta times the last innovation") {
    SarimaxParams params;
    params.order = {0, 0, 1, 0, 0, 0, 24};
    params.c = 2.0;
    params.theta = 0.4;
    params.beta = {1.5};
    params.exog = {"x"};
    params.residual_tail = {9.0};
    params.innovation_tail = {0.25};
    auto f = forecast_sarimax(params, 1, {2.0});
    CHECK(f[0] == Catch::Approx(2.0 + 1.5 * 2.0 + 0.4 * 0.25).margin(1e-14));
}

TEST_CASE("forecast validates horizon and exog rows") {
    SarimaxParams params;
    params.order = {1, 0, 1, 1, 0, 1, 24};
    params.exog = {"x"};
    params.beta = {1.0};
    params.residual_tail = std::vector<double>(25, 0.0);
    params.innovation_tail = std::vector<double>(25, 0.0);
    CHECK_THROWS_AS(forecast_sarimax(params, 0, {}), ValueError);
    CHECK_THROWS_AS(forecast_sarimax(params, 3, {1.0, 2.0}), ValueError);
}

TEST_CASE("fit rejects short training ranges") {
    auto frame = generate_synthetic({.n_rows = 300, .seed = 239});
    CHECK_THROWS_AS(fit_sarimax({1, 0, 1, 1, 0, 1, 24}, frame, "pm2_5", {}, {0, 200}), ValueError);
}

TEST_CASE("one-step predictions track the observed series") {
    auto frame = generate_synthetic({.n_rows = 2000, .seed = 241});
    const IndexRange train{0, 1700};
    auto params = fit_sarimax({1, 0, 1, 1, 0, 1, 24}, frame, "pm2_5", {"co"}, train);
    const std::size_t warm = train.begin + static_cast<std::size_t>(params.order.warmup());
    auto fitted = sarimax_one_step(params, frame, "pm2_5", train.begin, {warm, 1700});
    const auto y = frame.column_slice("pm2_5", {warm, 1700});
    double ss_fit = 0, ss_mean = 0, ybar = 0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_fit += (y[i] - fitted[i]) * (y[i] - fitted[i]);
        ss_mean += (y[i] - ybar) * (y[i] - ybar);
    }
    CHECK(ss_fit < ss_mean); // better than the mean predictor in-sample
}

TEST_CASE("sarimax json round trip") {
    auto frame = generate_synthetic({.n_rows = 1000, .seed = 251});
    auto params = fit_sarimax({1, 0, 1, 1, 0, 1, 24}, frame, "pm2_5", {"co"}, {0, 1000});
    auto restored = SarimaxParams::from_json(params.to_json());
    CHECK(restored.phi == params.phi);
    CHECK(restored.residual_tail == params.residual_tail);
    std::vector<double> exog(168, 0.5);
    CHECK(forecast_sarimax(restored, 168, exog) == forecast_sarimax(params, 168, exog));
}
