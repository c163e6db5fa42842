#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lightcast/frame.hpp"
#include "lightcast/stats.hpp"

namespace lightcast {

struct GridResult {
    TimeSeriesFrame frame;
    std::vector<std::int64_t> filled; // timestamps that had to be inserted
};

/// Rebuilds the frame on the complete hourly grid between its first and last
/// timestamp. Missing rows are linearly interpolated per column and logged.
/// Existing timestamps must already sit on the grid anchored at the first one.
inline GridResult enforce_hourly_grid(const TimeSeriesFrame& frame) {
    if (frame.rows() < 2) throw DataError("enforce_hourly_grid: need at least 2 timestamps");
    const auto& ts = frame.timestamps();
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const std::int64_t diff = ts[i] - ts[i - 1];
        if (diff % kSecondsPerHour != 0)
            throw DataError("timestamp off the hourly grid: " + format_iso8601_utc(ts[i]));
    }
    if (frame.is_hourly()) return {frame, {}};

    const std::size_t n_out = static_cast<std::size_t>((ts.back() - ts.front()) / kSecondsPerHour) + 1;
    std::vector<std::int64_t> grid(n_out);
    for (std::size_t i = 0; i < n_out; ++i)
        grid[i] = ts.front() + static_cast<std::int64_t>(i) * kSecondsPerHour;

    std::vector<double> values(n_out * frame.cols());
    std::vector<std::int64_t> filled;
    std::size_t src = 0; // index of the known row at or before the gap start
    for (std::size_t i = 0; i < n_out; ++i) {
        if (src + 1 < ts.size() && ts[src + 1] == grid[i]) ++src;
        if (ts[src] == grid[i]) {
            for (std::size_t c = 0; c < frame.cols(); ++c) values[i * frame.cols() + c] = frame.at(src, c);
        } else {
            // strictly inside the gap between src and src+1
            const double span = static_cast<double>(ts[src + 1] - ts[src]);
            const double w = static_cast<double>(grid[i] - ts[src]) / span;
            for (std::size_t c = 0; c < frame.cols(); ++c) {
                const double a = frame.at(src, c);
                const double b = frame.at(src + 1, c);
                values[i * frame.cols() + c] = a + w * (b - a);
            }
            filled.push_back(grid[i]);
        }
    }
    return {TimeSeriesFrame(std::move(grid), frame.columns(), std::move(values)), std::move(filled)};
}

struct FilterResult {
    TimeSeriesFrame frame;
    std::size_t replaced = 0;                  // total values replaced
    std::vector<std::size_t> replaced_by_column;
    std::vector<std::string> zero_variance;    // columns flagged and left untouched
};

/// Replaces per-column outliers with |z| > threshold by linear interpolation
/// between the nearest non-anomalous neighbours; edge anomalies take the
/// nearest valid value. z-scores use the sample standard deviation. Constant
/// columns are flagged and left unchanged.
inline FilterResult zscore_filter(const TimeSeriesFrame& frame, double threshold) {
    if (threshold <= 0) throw ValueError("zscore_filter: threshold must be positive");
    frame.require_hourly();

    FilterResult result{frame, 0, std::vector<std::size_t>(frame.cols(), 0), {}};
    const std::size_t n = frame.rows();
    if (n < 2) return result;

    std::vector<double> col(n);
    std::vector<char> anomalous(n);
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = frame.at(r, c);
        const double m = mean(col);
        const double sd = sample_std(col);
        if (sd == 0.0) {
            result.zero_variance.push_back(frame.columns()[c]);
            continue;
        }
        std::size_t n_anom = 0;
        for (std::size_t r = 0; r < n; ++r) {
            anomalous[r] = std::abs((col[r] - m) / sd) > threshold;
            n_anom += anomalous[r];
        }
        if (n_anom == 0) continue;
        if (n_anom == n) throw DataError("zscore_filter: no valid values left in " + frame.columns()[c]);

        for (std::size_t r = 0; r < n; ++r) {
            if (!anomalous[r]) continue;
            std::ptrdiff_t prev = static_cast<std::ptrdiff_t>(r) - 1;
            while (prev >= 0 && anomalous[static_cast<std::size_t>(prev)]) --prev;
            std::size_t next = r + 1;
            while (next < n && anomalous[next]) ++next;
            double value;
            if (prev < 0) {
                value = col[next];
            } else if (next >= n) {
                value = col[static_cast<std::size_t>(prev)];
            } else {
                const double w = static_cast<double>(r - static_cast<std::size_t>(prev)) /
                                 static_cast<double>(next - static_cast<std::size_t>(prev));
                value = col[static_cast<std::size_t>(prev)] +
                        w * (col[next] - col[static_cast<std::size_t>(prev)]);
            }
            result.frame.at(r, c) = value;
        }
        result.replaced += n_anom;
        result.replaced_by_column[c] = n_anom;
    }
    return result;
}

} // namespace lightcast
