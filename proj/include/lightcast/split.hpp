#pragma once

#include <cmath>

#include "lightcast/frame.hpp"

namespace lightcast {

inline constexpr std::size_t kTestHours = 168; // final 7 days

/// Chronological train/val/test partition covering the frame exactly.
struct SplitIndices {
    IndexRange train;
    IndexRange val;
    IndexRange test; // always 168 rows

    void validate(std::size_t n_rows) const {
        if (train.begin != 0 || train.end != val.begin || val.end != test.begin || test.end != n_rows)
            throw DataError("split ranges do not partition the frame");
        if (test.size() != kTestHours) throw DataError("test range must be 168 rows");
        if (train.empty() || val.empty()) throw DataError("empty train or val range");
    }
};

/// Carves the last 168 rows for test, then splits the remainder 8:1
/// chronologically (train = round(n * 8 / 9) rows, val = the rest).
inline SplitIndices chronological_split(std::size_t n_rows) {
    if (n_rows <= kTestHours) throw DataError("chronological_split: too few rows");
    const std::size_t n = n_rows - kTestHours;
    const std::size_t n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * 8.0 / 9.0));
    const std::size_t n_val = n - n_train;
    if (n_train == 0 || n_val == 0) throw DataError("chronological_split: too few rows");
    SplitIndices split{{0, n_train}, {n_train, n}, {n, n_rows}};
    split.validate(n_rows);
    return split;
}

inline SplitIndices chronological_split(const TimeSeriesFrame& frame) {
    return chronological_split(frame.rows());
}

} // namespace lightcast
