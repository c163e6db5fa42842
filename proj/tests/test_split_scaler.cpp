#include <catch2/catch_amalgamated.hpp>

#include "lightcast/scaler.hpp"
#include "lightcast/split.hpp"
#include "lightcast/synthetic.hpp"

using namespace lightcast;

TEST_CASE("chronological_split carves the final week then splits 8:1") {
    auto s = chronological_split(static_cast<std::size_t>(168 + 900));
    CHECK(s.train.begin == 0);
    CHECK(s.train.end == 800);
    CHECK(s.val.begin == 800);
    CHECK(s.val.end == 900);
    CHECK(s.test.begin == 900);
    CHECK(s.test.end == 1068);
}

TEST_CASE("chronological_split smallest viable remainder") {
    auto s = chronological_split(static_cast<std::size_t>(168 + 9));
    CHECK(s.train.size() == 8);
    CHECK(s.val.size() == 1);
    CHECK(s.test.size() == 168);
}

TEST_CASE("chronological_split rejects too few rows") {
    CHECK_THROWS_AS(chronological_split(std::size_t{169}), DataError);
    CHECK_THROWS_AS(chronological_split(std::size_t{168}), DataError);
    CHECK_THROWS_AS(chronological_split(std::size_t{10}), DataError);
}

TEST_CASE("chronological_split partitions the frame deterministically") {
    for (std::size_t n : {180u, 400u, 1068u, 5000u, 9999u}) {
        auto a = chronological_split(n);
        auto b = chronological_split(n);
        CHECK(a.train.end == b.train.end);
        a.validate(n); // contiguity, disjointness, 168-row test
        CHECK(a.test.size() == 168);
        CHECK(a.train.size() + a.val.size() + a.test.size() == n);
        // 8:1 ratio by rounding
        const double n_rem = static_cast<double>(n - 168);
        CHECK(static_cast<double>(a.train.size()) == Catch::Approx(n_rem * 8.0 / 9.0).margin(0.5));
    }
}

namespace {

TimeSeriesFrame toy_frame() {
    return TimeSeriesFrame({0, 3600, 7200}, {"x", "y"}, {2, 1, 4, 1, 6, 1});
}

} // namespace

TEST_CASE("scaler_fit computes population statistics on the train range") {
    auto f = toy_frame();
    auto scaler = Scaler::fit(f, {0, 3}, {"x"});
    CHECK(scaler.mean_of("x") == 4.0);
    CHECK(scaler.std_of("x") == Catch::Approx(1.632993).margin(1e-6));

    auto scaled = scaler.transform(f);
    CHECK(scaled.at(0, 0) == Catch::Approx(-1.224745).margin(1e-6));
    CHECK(scaled.at(1, 0) == 0.0); // the mean maps to 0 exactly
    CHECK(scaled.at(2, 0) == Catch::Approx(1.224745).margin(1e-6));
    CHECK(scaled.column("y") == f.column("y")); // unlisted columns untouched

    // value = mu + sigma maps to 1
    TimeSeriesFrame unit({0}, {"x", "y"}, {scaler.mean_of("x") + scaler.std_of("x"), 0.0});
    CHECK(scaler.transform(unit).at(0, 0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("scaler rejects constant columns and missing columns") {
    auto f = toy_frame();
    CHECK_THROWS_AS(Scaler::fit(f, {0, 3}, {"y"}), DataError);
    CHECK_THROWS_AS(Scaler::fit(f, {0, 0}, {"x"}), ValueError);
    auto scaler = Scaler::fit(f, {0, 3}, {"x"});
    TimeSeriesFrame other({0}, {"z"}, {1.0});
    CHECK_THROWS_AS(scaler.transform(other), ValueError);
}

TEST_CASE("scaler transform and inverse_transform round trip") {
    auto frame = generate_synthetic({.n_rows = 300, .seed = 5});
    auto scaler = Scaler::fit(frame, {0, 200}, {"co", "no2", "temp"});
    auto round = scaler.inverse_transform(scaler.transform(frame));
    for (std::size_t r = 0; r < frame.rows(); ++r)
        for (std::size_t c = 0; c < frame.cols(); ++c)
            CHECK(round.at(r, c) == Catch::Approx(frame.at(r, c)).epsilon(1e-12));
}

TEST_CASE("scaler fit on a train range equals fit on the isolated train slice bit-for-bit") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto frame = generate_synthetic({.n_rows = 400, .seed = seed});
        auto split = chronological_split(frame.rows());
        auto a = Scaler::fit(frame, split.train, {"co", "no", "so2"});
        auto b = Scaler::fit(frame.slice_rows(split.train), {0, split.train.size()}, {"co", "no", "so2"});
        for (const auto& col : {"co", "no", "so2"}) {
            CHECK(a.mean_of(col) == b.mean_of(col));
            CHECK(a.std_of(col) == b.std_of(col));
        }
    }
}

TEST_CASE("scaler json round trip") {
    auto f = toy_frame();
    auto scaler = Scaler::fit(f, {0, 3}, {"x"});
    auto restored = Scaler::from_json(scaler.to_json());
    CHECK(restored.mean_of("x") == scaler.mean_of("x"));
    CHECK(restored.std_of("x") == scaler.std_of("x"));
}
