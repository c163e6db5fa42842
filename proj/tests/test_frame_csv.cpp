#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "lightcast/csv.hpp"
#include "lightcast/frame.hpp"
#include "lightcast/timeutil.hpp"

using namespace lightcast;

namespace {

TimeSeriesFrame hourly_frame(std::size_t n, std::vector<std::string> columns,
                             std::vector<double> values, std::int64_t start = 0) {
    std::vector<std::int64_t> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = start + static_cast<std::int64_t>(i) * kSecondsPerHour;
    return TimeSeriesFrame(std::move(ts), std::move(columns), std::move(values));
}

} // namespace

TEST_CASE("iso8601 round trip") {
    CHECK(parse_iso8601_utc("1970-01-02T00:00:00Z") == 86400);
    CHECK(parse_iso8601_utc("2021-01-01T00:00:00Z") == timestamp_from_civil(2021, 1, 1));
    CHECK(format_iso8601_utc(timestamp_from_civil(2021, 1, 1, 5)) == "2021-01-01T05:00:00Z");
    // Open-Meteo short form
    CHECK(parse_iso8601_utc("2021-01-01T05:00") == timestamp_from_civil(2021, 1, 1, 5));
    CHECK(parse_iso8601_utc("2021-01-01") == timestamp_from_civil(2021, 1, 1));
    CHECK(format_iso_date(timestamp_from_civil(2021, 6, 30, 13)) == "2021-06-30");
    CHECK_THROWS_AS(parse_iso8601_utc("garbage"), ValueError);
    CHECK_THROWS_AS(parse_iso8601_utc("2021-13-01T00:00:00Z"), ValueError);
}

TEST_CASE("calendar helpers") {
    const auto ts = timestamp_from_civil(2021, 1, 1, 5); // a Friday
    CHECK(hour_of_day(ts) == 5);
    CHECK(day_of_week(ts) == 4);
    CHECK(day_of_week(timestamp_from_civil(1970, 1, 1)) == 3); // Thursday
}

TEST_CASE("frame construction validates ordering and columns") {
    CHECK_THROWS_AS(TimeSeriesFrame({3600, 3600}, {"a"}, {1.0, 2.0}), DataError);
    CHECK_THROWS_AS(TimeSeriesFrame({7200, 3600}, {"a"}, {1.0, 2.0}), DataError);
    CHECK_THROWS_AS(TimeSeriesFrame({0, 3600}, {"a", "a"}, {1, 2, 3, 4}), DataError);
    CHECK_THROWS_AS(TimeSeriesFrame({0, 3600}, {"a"}, {1.0}), ValueError);

    auto f = hourly_frame(3, {"a", "b"}, {1, 2, 3, 4, 5, 6});
    CHECK(f.rows() == 3);
    CHECK(f.at(1, 1) == 4);
    CHECK(f.column("b") == std::vector<double>{2, 4, 6});
    CHECK(f.column_slice("a", {1, 3}) == std::vector<double>{3, 5});
    CHECK_THROWS_AS(f.column_index("missing"), ValueError);
    CHECK(f.is_hourly());
}

TEST_CASE("frame slicing and column editing") {
    auto f = hourly_frame(4, {"a", "b"}, {1, 10, 2, 20, 3, 30, 4, 40});
    auto sliced = f.slice_rows({1, 3});
    CHECK(sliced.rows() == 2);
    CHECK(sliced.at(0, 0) == 2);
    CHECK(sliced.timestamps().front() == kSecondsPerHour);

    auto selected = f.select_columns({"b"});
    CHECK(selected.cols() == 1);
    CHECK(selected.column("b") == std::vector<double>{10, 20, 30, 40});

    auto dropped = f.drop_column("a");
    CHECK(dropped.columns() == std::vector<std::string>{"b"});

    f.add_column("c", {7, 8, 9, 10});
    CHECK(f.at(2, 2) == 9);
    CHECK_THROWS_AS(f.add_column("c", {1, 2, 3, 4}), DataError);
}

TEST_CASE("csv round trip preserves values exactly") {
    auto f = hourly_frame(3, {"pm2_5", "temp"},
                          {12.25, -3.5, 0.1, 14.125, 7.0, 1e-9},
                          timestamp_from_civil(2021, 1, 1));
    const auto path = std::filesystem::temp_directory_path() / "lightcast_csv_test.csv";
    save_csv(f, path.string());
    const auto loaded = load_csv(path.string());
    CHECK(loaded.columns() == f.columns());
    CHECK(loaded.timestamps() == f.timestamps());
    CHECK(loaded.values() == f.values());
    std::filesystem::remove(path);
}

TEST_CASE("csv rejects malformed input") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();
    const auto write = [&](const char* name, const char* content) {
        const auto p = dir / name;
        std::FILE* fp = std::fopen(p.string().c_str(), "w");
        std::fputs(content, fp);
        std::fclose(fp);
        return p.string();
    };
    CHECK_THROWS_AS(load_csv((dir / "does_not_exist.csv").string()), IoError);
    CHECK_THROWS_AS(load_csv(write("bad_header.csv", "time,a\n")), IoError);
    CHECK_THROWS_AS(load_csv(write("bad_value.csv", "timestamp,a\n2021-01-01T00:00:00Z,abc\n")), IoError);
    CHECK_THROWS_AS(load_csv(write("bad_width.csv", "timestamp,a\n2021-01-01T00:00:00Z,1,2\n")), IoError);
}
