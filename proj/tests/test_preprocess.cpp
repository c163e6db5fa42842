#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lightcast/preprocess.hpp"
#include "lightcast/synthetic.hpp"

using namespace lightcast;

namespace {

TimeSeriesFrame single_column(std::vector<std::int64_t> hours, std::vector<double> values) {
    for (auto& h : hours) h *= kSecondsPerHour;
    return TimeSeriesFrame(std::move(hours), {"x"}, std::move(values));
}

} // namespace

TEST_CASE("enforce_hourly_grid keeps a gap-free frame unchanged") {
    auto f = single_column({0, 1, 2, 3}, {1, 2, 3, 4});
    auto result = enforce_hourly_grid(f);
    CHECK(result.filled.empty());
    CHECK(result.frame.values() == f.values());
    CHECK(result.frame.timestamps() == f.timestamps());
}

TEST_CASE("enforce_hourly_grid interpolates missing hours") {
    auto result = enforce_hourly_grid(single_column({0, 1, 3}, {10, 12, 16}));
    REQUIRE(result.frame.rows() == 4);
    CHECK(result.frame.at(2, 0) == 14.0);
    REQUIRE(result.filled.size() == 1);
    CHECK(result.filled[0] == 2 * kSecondsPerHour);

    SECTION("idempotent") {
        auto again = enforce_hourly_grid(result.frame);
        CHECK(again.filled.empty());
        CHECK(again.frame.values() == result.frame.values());
    }
}

TEST_CASE("enforce_hourly_grid interpolates across multi-hour gaps") {
    auto result = enforce_hourly_grid(single_column({0, 4}, {0, 8}));
    REQUIRE(result.frame.rows() == 5);
    CHECK(result.frame.at(1, 0) == 2.0);
    CHECK(result.frame.at(2, 0) == 4.0);
    CHECK(result.frame.at(3, 0) == 6.0);
    CHECK(result.filled.size() == 3);
}

TEST_CASE("enforce_hourly_grid rejects bad input") {
    CHECK_THROWS_AS(enforce_hourly_grid(single_column({1}, {1.0})), DataError);
    // off-grid timestamp (30 minutes past the hour)
    TimeSeriesFrame off({0, 1800 + kSecondsPerHour}, {"x"}, {1.0, 2.0});
    CHECK_THROWS_AS(enforce_hourly_grid(off), DataError);
    // duplicate timestamps cannot even form a frame
    CHECK_THROWS_AS(single_column({1, 1}, {1.0, 1.0}), DataError);
}

TEST_CASE("zscore_filter flags constant columns and leaves them alone") {
    auto f = single_column({0, 1, 2, 3}, {5, 5, 5, 5});
    auto result = zscore_filter(f, 3.0);
    CHECK(result.replaced == 0);
    REQUIRE(result.zero_variance.size() == 1);
    CHECK(result.zero_variance[0] == "x");
    CHECK(result.frame.values() == f.values());
}

TEST_CASE("zscore_filter keeps values below the threshold") {
    // z of the 100 is about 2.85 with the sample standard deviation
    std::vector<double> values = {1, 1, 1, 1, 100, 1, 1, 1, 1, 1};
    auto f = single_column({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, values);
    const double z = (100.0 - mean(values)) / sample_std(values);
    CHECK(z == Catch::Approx(2.8461).margin(5e-4));
    auto result = zscore_filter(f, 3.0);
    CHECK(result.replaced == 0);
    CHECK(result.frame.values() == f.values());
}

TEST_CASE("zscore_filter replaces a gross outlier by neighbour interpolation") {
    GaussianSampler gauss(7);
    std::vector<double> values(201);
    std::vector<std::int64_t> hours(201);
    for (std::size_t i = 0; i < 201; ++i) {
        hours[i] = static_cast<std::int64_t>(i);
        values[i] = gauss.normal();
    }
    values[100] = 50.0;
    const double z = (50.0 - mean(values)) / sample_std(values);
    REQUIRE(z > 5.0);

    auto f = single_column(std::move(hours), values);
    auto result = zscore_filter(f, 5.0);
    CHECK(result.replaced == 1);
    CHECK(result.replaced_by_column[0] == 1);
    const double expected = values[99] + 0.5 * (values[101] - values[99]);
    CHECK(result.frame.at(100, 0) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zscore_filter handles edge anomalies with the nearest valid value") {
    std::vector<double> values(50, 0.0);
    GaussianSampler gauss(11);
    for (auto& v : values) v = gauss.normal();
    values[0] = 80.0;
    values[49] = -90.0;
    std::vector<std::int64_t> hours(50);
    for (std::size_t i = 0; i < 50; ++i) hours[i] = static_cast<std::int64_t>(i);
    auto result = zscore_filter(single_column(std::move(hours), values), 4.0);
    CHECK(result.replaced == 2);
    CHECK(result.frame.at(0, 0) == values[1]);
    CHECK(result.frame.at(49, 0) == values[48]);
}

TEST_CASE("zscore_filter replacement count matches an oracle over random frames") {
    GaussianSampler gauss(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 120;
        std::vector<std::int64_t> ts(n);
        std::vector<double> values(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            ts[i] = static_cast<std::int64_t>(i) * kSecondsPerHour;
            values[i * 2] = gauss.normal() * 3.0;
            values[i * 2 + 1] = 10.0 + gauss.normal();
        }
        // inject a handful of spikes
        for (int k = 0; k < trial % 4; ++k) values[(17 + 31 * static_cast<std::size_t>(k)) * 2] = 1000.0;
        TimeSeriesFrame frame(ts, {"a", "b"}, values);

        const double threshold = 3.5;
        std::size_t expected = 0;
        for (std::size_t c = 0; c < 2; ++c) {
            std::vector<double> col(n);
            for (std::size_t r = 0; r < n; ++r) col[r] = values[r * 2 + c];
            const double m = mean(col);
            const double sd = sample_std(col);
            for (double v : col)
                if (std::abs((v - m) / sd) > threshold) ++expected;
        }
        auto result = zscore_filter(frame, threshold);
        CHECK(result.replaced == expected);
        // untouched values stay bit-identical
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < 2; ++c) {
                std::vector<double> col(n);
                for (std::size_t i = 0; i < n; ++i) col[i] = values[i * 2 + c];
                const double z = std::abs((values[r * 2 + c] - mean(col)) / sample_std(col));
                if (z <= threshold) CHECK(result.frame.at(r, c) == values[r * 2 + c]);
            }
    }
}

TEST_CASE("zscore_filter rejects nonpositive thresholds") {
    auto f = single_column({0, 1}, {1, 2});
    CHECK_THROWS_AS(zscore_filter(f, 0.0), ValueError);
    CHECK_THROWS_AS(zscore_filter(f, -1.0), ValueError);
}
