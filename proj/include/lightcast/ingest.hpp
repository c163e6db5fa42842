#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lightcast/frame.hpp"
#include "lightcast/preprocess.hpp"
#include "lightcast/timeutil.hpp"

namespace lightcast {

struct ProviderQuery {
    double latitude = 0;
    double longitude = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::optional<std::string> api_key;

    void validate() const {
        if (start >= end) throw ValueError("provider query: start must precede end");
        if (latitude < -90 || latitude > 90) throw ValueError("provider query: latitude out of range");
        if (longitude < -180 || longitude > 180) throw ValueError("provider query: longitude out of range");
    }
};

struct HttpResponse {
    int status = 0; // 0 = connection failure
    std::string body;
};

using HttpGetFn = std::function<HttpResponse(const std::string& url)>;
using SleepFn = std::function<void(double seconds)>;

enum class FetchMode { live, fixture };

/// Fixture mode loads recorded provider JSON from fixture_dir, so the whole
/// pipeline runs offline; live mode goes through http_get with retry/backoff.
struct IngestOptions {
    FetchMode mode = FetchMode::fixture;
    std::string fixture_dir; // falls back to $LIGHTCAST_FIXTURE_DIR
    HttpGetFn http_get;
    int max_retries = 4;
    double backoff_seconds = 0.5; // doubled after every transient failure
    SleepFn sleep = [](double seconds) {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
};

inline constexpr const char* kOpenWeatherFixture = "openweather_air_pollution.json";
inline constexpr const char* kOpenMeteoFixture = "open_meteo_archive.json";
inline constexpr std::int64_t kChunkSeconds = 30 * kSecondsPerDay; // provider payload limit

/// Thread-safe token bucket; acquire() blocks until a token is available.
class TokenBucket {
public:
    TokenBucket(std::size_t capacity, double refill_per_second, SleepFn sleep = {})
        : capacity_(capacity), refill_per_second_(refill_per_second),
          tokens_(static_cast<double>(capacity)), sleep_(std::move(sleep)),
          last_(std::chrono::steady_clock::now()) {}

    void acquire() {
        while (true) {
            {
                std::lock_guard<std::mutex> lock(mutex_);
                refill();
                if (tokens_ >= 1.0) {
                    tokens_ -= 1.0;
                    return;
                }
            }
            const double wait = 1.0 / refill_per_second_;
            if (sleep_)
                sleep_(wait);
            else
                std::this_thread::sleep_for(std::chrono::duration<double>(wait));
        }
    }

    double available() {
        std::lock_guard<std::mutex> lock(mutex_);
        refill();
        return tokens_;
    }

private:
    void refill() {
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        tokens_ = std::min(static_cast<double>(capacity_), tokens_ + elapsed * refill_per_second_);
    }

    std::size_t capacity_;
    double refill_per_second_;
    double tokens_;
    SleepFn sleep_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mutex_;
};

namespace detail {

// 50 requests/min per provider
inline TokenBucket& openweather_bucket() {
    static TokenBucket bucket(50, 50.0 / 60.0);
    return bucket;
}
inline TokenBucket& openmeteo_bucket() {
    static TokenBucket bucket(50, 50.0 / 60.0);
    return bucket;
}

inline nlohmann::json parse_json_body(const std::string& body, const char* provider) {
    nlohmann::json payload = nlohmann::json::parse(body, nullptr, false);
    if (payload.is_discarded())
        throw MalformedPayloadError(std::string(provider) + ": response is not valid JSON");
    return payload;
}

inline nlohmann::json http_get_with_retry(const IngestOptions& options, TokenBucket& bucket,
                                          const std::string& url, const char* provider) {
    if (!options.http_get) throw ValueError(std::string(provider) + ": no HTTP transport configured");
    double backoff = options.backoff_seconds;
    for (int attempt = 0;; ++attempt) {
        bucket.acquire();
        const HttpResponse response = options.http_get(url);
        if (response.status == 200) return parse_json_body(response.body, provider);
        if (response.status == 401 || response.status == 403)
            throw AuthError(std::string(provider) + ": authentication rejected (HTTP " +
                                std::to_string(response.status) + ")",
                            response.status);
        const bool transient = response.status == 0 || response.status == 429 || response.status >= 500;
        if (!transient || attempt >= options.max_retries)
            throw HttpError(std::string(provider) + ": HTTP " + std::to_string(response.status) +
                                " after " + std::to_string(attempt + 1) + " attempt(s)",
                            response.status);
        if (options.sleep) options.sleep(backoff);
        backoff *= 2.0;
    }
}

inline std::string format_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline nlohmann::json load_fixture(const IngestOptions& options, const char* filename,
                                   const char* provider) {
    std::string dir = options.fixture_dir;
    if (dir.empty()) {
        const char* env = std::getenv("LIGHTCAST_FIXTURE_DIR");
        if (env != nullptr) dir = env;
    }
    if (dir.empty())
        throw ValueError(std::string(provider) + ": fixture mode needs a fixture directory");
    const std::string path = dir + "/" + filename;
    std::ifstream in(path);
    if (!in) throw IoError(std::string(provider) + ": cannot open fixture " + path);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_json_body(body, provider);
}

struct TimedRow {
    std::int64_t ts;
    std::vector<double> values;
};

inline TimeSeriesFrame rows_to_frame(std::vector<TimedRow> rows, std::vector<std::string> columns,
                                     const char* provider) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const TimedRow& a, const TimedRow& b) { return a.ts < b.ts; });
    // chunked requests can overlap at the boundaries; keep the first row per timestamp
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [](const TimedRow& a, const TimedRow& b) { return a.ts == b.ts; }),
               rows.end());
    if (rows.empty()) throw EmptyPayloadError(std::string(provider) + ": no usable rows");
    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    timestamps.reserve(rows.size());
    values.reserve(rows.size() * columns.size());
    for (auto& row : rows) {
        timestamps.push_back(row.ts);
        for (double v : row.values) {
            if (!std::isfinite(v))
                throw MalformedPayloadError(std::string(provider) + ": non-finite value at " +
                                            format_iso8601_utc(row.ts));
            values.push_back(v);
        }
    }
    return TimeSeriesFrame(std::move(timestamps), std::move(columns), std::move(values));
}

} // namespace detail

inline const std::vector<std::string>& pollutant_columns() {
    static const std::vector<std::string> columns = {"pm2_5", "pm10", "co", "no",
                                                     "no2",   "so2",  "o3", "nh3"};
    return columns;
}

/// Parses an OpenWeather air_pollution/history document into a frame with the
/// eight pollutant columns. Rows outside [window_start, window_end] are
/// dropped when a window is given.
inline TimeSeriesFrame parse_openweather_payload(const nlohmann::json& payload,
                                                 std::optional<std::int64_t> window_start = {},
                                                 std::optional<std::int64_t> window_end = {}) {
    if (!payload.is_object() || !payload.contains("list") || !payload.at("list").is_array())
        throw MalformedPayloadError("openweather: payload has no 'list' array");
    const auto& list = payload.at("list");
    if (list.empty()) throw EmptyPayloadError("openweather: empty 'list'");

    std::vector<detail::TimedRow> rows;
    rows.reserve(list.size());
    for (const auto& entry : list) {
        if (!entry.contains("dt") || !entry.contains("components"))
            throw MalformedPayloadError("openweather: entry missing 'dt' or 'components'");
        const std::int64_t ts = entry.at("dt").get<std::int64_t>();
        if (window_start && ts < *window_start) continue;
        if (window_end && ts > *window_end) continue;
        const auto& comp = entry.at("components");
        detail::TimedRow row{ts, {}};
        row.values.reserve(pollutant_columns().size());
        for (const auto& name : pollutant_columns()) {
            if (!comp.contains(name) || !comp.at(name).is_number())
                throw MalformedPayloadError("openweather: components missing '" + name + "'");
            row.values.push_back(comp.at(name).get<double>());
        }
        rows.push_back(std::move(row));
    }
    return detail::rows_to_frame(std::move(rows), pollutant_columns(), "openweather");
}

/// Parses an Open-Meteo /v1/archive document into a {temp, dew_point} frame.
/// Hours where either variable is null are dropped; an all-null document is an
/// empty-payload error.
inline TimeSeriesFrame parse_open_meteo_payload(const nlohmann::json& payload,
                                                std::optional<std::int64_t> window_start = {},
                                                std::optional<std::int64_t> window_end = {}) {
    if (!payload.is_object() || !payload.contains("hourly"))
        throw MalformedPayloadError("open-meteo: payload has no 'hourly' object");
    const auto& hourly = payload.at("hourly");
    for (const char* key : {"time", "temperature_2m", "dew_point_2m"})
        if (!hourly.contains(key) || !hourly.at(key).is_array())
            throw MalformedPayloadError(std::string("open-meteo: hourly missing '") + key + "' array");
    const auto& time = hourly.at("time");
    const auto& temp = hourly.at("temperature_2m");
    const auto& dew = hourly.at("dew_point_2m");
    if (temp.size() != time.size() || dew.size() != time.size())
        throw MalformedPayloadError("open-meteo: hourly array lengths disagree");

    std::vector<detail::TimedRow> rows;
    rows.reserve(time.size());
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (temp[i].is_null() || dew[i].is_null()) continue;
        const std::int64_t ts = parse_iso8601_utc(time[i].get<std::string>());
        if (window_start && ts < *window_start) continue;
        if (window_end && ts > *window_end) continue;
        rows.push_back({ts, {temp[i].get<double>(), dew[i].get<double>()}});
    }
    return detail::rows_to_frame(std::move(rows), {"temp", "dew_point"}, "open-meteo");
}

/// OpenWeather air-pollution history at hourly resolution over [start, end].
/// Live requests are chunked into 30-day windows with retry and rate limiting.
inline TimeSeriesFrame fetch_pollutants(const ProviderQuery& query, const IngestOptions& options) {
    query.validate();
    if (options.mode == FetchMode::fixture) {
        const auto payload = detail::load_fixture(options, kOpenWeatherFixture, "openweather");
        return parse_openweather_payload(payload, query.start, query.end);
    }
    if (!query.api_key || query.api_key->empty())
        throw ValueError("openweather: api_key required for live fetches");

    std::vector<detail::TimedRow> rows;
    for (std::int64_t chunk = query.start; chunk <= query.end; chunk += kChunkSeconds) {
        const std::int64_t chunk_end = std::min(query.end, chunk + kChunkSeconds - kSecondsPerHour);
        const std::string url = "https://api.openweathermap.org/data/2.5/air_pollution/history?lat=" +
                                detail::format_coord(query.latitude) +
                                "&lon=" + detail::format_coord(query.longitude) +
                                "&start=" + std::to_string(chunk) + "&end=" + std::to_string(chunk_end) +
                                "&appid=" + *query.api_key;
        const auto payload =
            detail::http_get_with_retry(options, detail::openweather_bucket(), url, "openweather");
        const auto frame = parse_openweather_payload(payload, chunk, chunk_end);
        for (std::size_t r = 0; r < frame.rows(); ++r) {
            detail::TimedRow row{frame.timestamps()[r], {}};
            for (std::size_t c = 0; c < frame.cols(); ++c) row.values.push_back(frame.at(r, c));
            rows.push_back(std::move(row));
        }
    }
    return detail::rows_to_frame(std::move(rows), pollutant_columns(), "openweather");
}

/// Open-Meteo archive temperature and dew point; no API key required.
inline TimeSeriesFrame fetch_weather(const ProviderQuery& query, const IngestOptions& options) {
    query.validate();
    if (options.mode == FetchMode::fixture) {
        const auto payload = detail::load_fixture(options, kOpenMeteoFixture, "open-meteo");
        return parse_open_meteo_payload(payload, query.start, query.end);
    }

    std::vector<detail::TimedRow> rows;
    for (std::int64_t chunk = query.start; chunk <= query.end; chunk += kChunkSeconds) {
        const std::int64_t chunk_end = std::min(query.end, chunk + kChunkSeconds - kSecondsPerHour);
        const std::string url = "https://archive-api.open-meteo.com/v1/archive?latitude=" +
                                detail::format_coord(query.latitude) +
                                "&longitude=" + detail::format_coord(query.longitude) +
                                "&start_date=" + format_iso_date(chunk) +
                                "&end_date=" + format_iso_date(chunk_end) +
                                "&hourly=temperature_2m,dew_point_2m&timezone=UTC";
        const auto payload =
            detail::http_get_with_retry(options, detail::openmeteo_bucket(), url, "open-meteo");
        const auto frame = parse_open_meteo_payload(payload, chunk, chunk_end);
        for (std::size_t r = 0; r < frame.rows(); ++r)
            rows.push_back({frame.timestamps()[r], {frame.at(r, 0), frame.at(r, 1)}});
    }
    return detail::rows_to_frame(std::move(rows), {"temp", "dew_point"}, "open-meteo");
}

/// Inner join on the timestamp ranges, column union, then a pass through
/// enforce_hourly_grid so the merged frame sits on the full hourly grid.
inline TimeSeriesFrame merge_sources(const TimeSeriesFrame& a, const TimeSeriesFrame& b) {
    if (a.empty() || b.empty()) throw DataError("merge_sources: empty input frame");
    for (const auto& col : b.columns())
        if (a.has_column(col)) throw DataError("merge_sources: duplicate column " + col);

    const std::int64_t lo = std::max(a.timestamps().front(), b.timestamps().front());
    const std::int64_t hi = std::min(a.timestamps().back(), b.timestamps().back());
    if (lo > hi) throw DataError("merge_sources: timestamp ranges do not intersect");

    // align on the timestamps present in both frames
    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    std::size_t ia = 0, ib = 0;
    while (ia < a.rows() && ib < b.rows()) {
        const std::int64_t ta = a.timestamps()[ia];
        const std::int64_t tb = b.timestamps()[ib];
        if (ta < tb) {
            ++ia;
        } else if (tb < ta) {
            ++ib;
        } else {
            timestamps.push_back(ta);
            for (std::size_t c = 0; c < a.cols(); ++c) values.push_back(a.at(ia, c));
            for (std::size_t c = 0; c < b.cols(); ++c) values.push_back(b.at(ib, c));
            ++ia;
            ++ib;
        }
    }
    if (timestamps.empty()) throw DataError("merge_sources: timestamp ranges do not intersect");

    std::vector<std::string> columns = a.columns();
    columns.insert(columns.end(), b.columns().begin(), b.columns().end());
    TimeSeriesFrame joined(std::move(timestamps), std::move(columns), std::move(values));
    if (joined.rows() < 2) return joined;
    return enforce_hourly_grid(joined).frame;
}

} // namespace lightcast
