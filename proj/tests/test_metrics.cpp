#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lightcast/metrics.hpp"
#include "lightcast/synthetic.hpp"

using namespace lightcast;

TEST_CASE("mae hand cases") {
    std::vector<double> y = {1, 2, 3};
    CHECK(mae(y, y) == 0.0);
    CHECK(mae(y, std::vector<double>{2, 2, 2}) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    // translation invariance
    std::vector<double> ys = {11, 12, 13}, yh = {12, 12, 12};
    CHECK(mae(ys, yh) == Catch::Approx(2.0 / 3.0).margin(1e-15));
    CHECK_THROWS_AS(mae(y, std::vector<double>{1}), ValueError);
    CHECK_THROWS_AS(mae({}, {}), ValueError);
}

TEST_CASE("rmse hand cases") {
    std::vector<double> y = {0, 0};
    CHECK(rmse(y, y) == 0.0);
    CHECK(rmse(y, std::vector<double>{3, 4}) == Catch::Approx(std::sqrt(12.5)).margin(1e-12));
}

TEST_CASE("rmse dominates mae on random inputs") {
    GaussianSampler gauss(401);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(gauss.uniform() * 20);
        std::vector<double> y(n), yhat(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = gauss.normal() * 10;
            yhat[i] = gauss.normal() * 10;
        }
        CHECK(rmse(y, yhat) >= mae(y, yhat) - 1e-12);
    }
}

TEST_CASE("r_squared hand cases") {
    std::vector<double> y = {1, 2, 3};
    CHECK(r_squared(y, y) == 1.0);
    std::vector<double> mean_pred = {2, 2, 2};
    CHECK(r_squared(y, mean_pred) == Catch::Approx(0.0).margin(1e-15));
    CHECK(r_squared(y, std::vector<double>{3, 2, 1}) == Catch::Approx(-3.0).margin(1e-12));
    CHECK_THROWS_AS(r_squared(std::vector<double>{5, 5, 5}, y), DataError);
}

TEST_CASE("r_squared is 1 exactly when rmse is 0") {
    GaussianSampler gauss(409);
    std::vector<double> y(50), yhat(50);
    for (std::size_t i = 0; i < 50; ++i) {
        y[i] = gauss.normal();
        yhat[i] = y[i] + 0.1 * gauss.normal();
    }
    CHECK(r_squared(y, yhat) < 1.0);
    CHECK(r_squared(y, y) == 1.0);
}

TEST_CASE("metrics report json round trip and table layout") {
    MetricsReport report;
    report.generated_at = timestamp_from_civil(2025, 6, 30);
    report.config_digest = "abc123";
    report.rows = {
        {"fbp", "pm2_5", "train", 14.4, 24.6, 0.8, 4000, 0},
        {"fbp", "pm2_5", "test", 4.3, 5.4, 0.94, 168, 0.5},
        {"sarimax", "pm2_5", "train", 2.7, 6.9, 0.9, 4000, 0},
        {"sarimax", "pm2_5", "test", 17.1, 18.0, 0.41, 168, 0.9},
    };
    auto restored = MetricsReport::from_json(report.to_json());
    CHECK(restored.rows.size() == 4);
    CHECK(restored.config_digest == "abc123");
    CHECK(restored.find("fbp", "pm2_5", "test")->rmse == 5.4);
    CHECK(restored.find("fbp", "pm2_5", "test")->rmse_vs_persistence == 0.5);

    const std::string table = report.to_table();
    CHECK(table.find("fbp") != std::string::npos);
    CHECK(table.find("sarimax") != std::string::npos);
    CHECK(table.find("--") != std::string::npos); // missing val cells
    // fbp prints before sarimax (fixed row order)
    CHECK(table.find("fbp") < table.find("sarimax"));
}

TEST_CASE("synthetic generator is deterministic and well formed") {
    auto a = generate_synthetic({.n_rows = 500, .seed = 9});
    auto b = generate_synthetic({.n_rows = 500, .seed = 9});
    CHECK(a.values() == b.values());
    CHECK(a.timestamps() == b.timestamps());
    a.require_hourly();
    CHECK(a.all_finite());
    CHECK(a.cols() == 10);

    auto c = generate_synthetic({.n_rows = 500, .seed = 10});
    CHECK(a.values() != c.values());
}

TEST_CASE("synthetic channels are coupled through the latent factor") {
    auto frame = generate_synthetic({.n_rows = 4000, .seed = 11});
    const auto pm25 = frame.column("pm2_5");
    const auto pm10 = frame.column("pm10");
    const auto co = frame.column("co");
    double num = 0, da = 0, db = 0, ma = 0, mb = 0;
    for (double v : pm25) ma += v;
    for (double v : pm10) mb += v;
    ma /= static_cast<double>(pm25.size());
    mb /= static_cast<double>(pm10.size());
    for (std::size_t i = 0; i < pm25.size(); ++i) {
        num += (pm25[i] - ma) * (pm10[i] - mb);
        da += (pm25[i] - ma) * (pm25[i] - ma);
        db += (pm10[i] - mb) * (pm10[i] - mb);
    }
    CHECK(num / std::sqrt(da * db) > 0.8); // strongly cross-linked particulates
    (void)co;
}
