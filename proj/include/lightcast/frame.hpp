#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lightcast/errors.hpp"
#include "lightcast/timeutil.hpp"

namespace lightcast {

/// Half-open row range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return end <= begin; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
};

/// Aligned hourly multi-variable matrix with a UTC timestamp index.
///
/// Timestamps are integral seconds since epoch and strictly increasing.
/// Values are stored row-major, one row per timestamp. Operations that
/// require the gap-free hourly grid call require_hourly() explicitly;
/// construction only enforces ordering and unique column names.
class TimeSeriesFrame {
public:
    TimeSeriesFrame() = default;

    TimeSeriesFrame(std::vector<std::int64_t> timestamps, std::vector<std::string> columns,
                    std::vector<double> values)
        : timestamps_(std::move(timestamps)), columns_(std::move(columns)), values_(std::move(values)) {
        if (values_.size() != timestamps_.size() * columns_.size())
            throw ValueError("frame value count does not match rows x columns");
        for (std::size_t i = 1; i < timestamps_.size(); ++i) {
            if (timestamps_[i] == timestamps_[i - 1])
                throw DataError("duplicate timestamp " + format_iso8601_utc(timestamps_[i]));
            if (timestamps_[i] < timestamps_[i - 1])
                throw DataError("timestamps not increasing at " + format_iso8601_utc(timestamps_[i]));
        }
        std::unordered_set<std::string_view> seen;
        for (const auto& c : columns_)
            if (!seen.insert(c).second) throw DataError("duplicate column name: " + c);
    }

    std::size_t rows() const { return timestamps_.size(); }
    std::size_t cols() const { return columns_.size(); }
    bool empty() const { return timestamps_.empty(); }

    const std::vector<std::int64_t>& timestamps() const { return timestamps_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<double>& values() const { return values_; }

    double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
    double& at(std::size_t row, std::size_t col) { return values_[row * columns_.size() + col]; }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_.data() + r * cols(), cols());
    }

    bool has_column(std::string_view name) const {
        return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
    }

    std::size_t column_index(std::string_view name) const {
        const auto it = std::find(columns_.begin(), columns_.end(), name);
        if (it == columns_.end()) throw ValueError("no such column: " + std::string(name));
        return static_cast<std::size_t>(it - columns_.begin());
    }

    std::vector<double> column(std::string_view name) const {
        return column_slice(name, {0, rows()});
    }

    std::vector<double> column_slice(std::string_view name, IndexRange range) const {
        check_range(range);
        const std::size_t c = column_index(name);
        std::vector<double> out;
        out.reserve(range.size());
        for (std::size_t r = range.begin; r < range.end; ++r) out.push_back(at(r, c));
        return out;
    }

    TimeSeriesFrame slice_rows(IndexRange range) const {
        check_range(range);
        std::vector<std::int64_t> ts(timestamps_.begin() + static_cast<std::ptrdiff_t>(range.begin),
                                     timestamps_.begin() + static_cast<std::ptrdiff_t>(range.end));
        std::vector<double> vals(values_.begin() + static_cast<std::ptrdiff_t>(range.begin * cols()),
                                 values_.begin() + static_cast<std::ptrdiff_t>(range.end * cols()));
        return TimeSeriesFrame(std::move(ts), columns_, std::move(vals));
    }

    TimeSeriesFrame select_columns(const std::vector<std::string>& names) const {
        std::vector<std::size_t> idx;
        idx.reserve(names.size());
        for (const auto& n : names) idx.push_back(column_index(n));
        std::vector<double> vals;
        vals.reserve(rows() * names.size());
        for (std::size_t r = 0; r < rows(); ++r)
            for (std::size_t c : idx) vals.push_back(at(r, c));
        return TimeSeriesFrame(timestamps_, names, std::move(vals));
    }

    TimeSeriesFrame drop_column(std::string_view name) const {
        std::vector<std::string> keep;
        keep.reserve(cols());
        for (const auto& c : columns_)
            if (c != name) keep.push_back(c);
        if (keep.size() == cols()) throw ValueError("no such column: " + std::string(name));
        return select_columns(keep);
    }

    void set_column(std::string_view name, std::span<const double> vals) {
        if (vals.size() != rows()) throw ValueError("column length does not match row count");
        const std::size_t c = column_index(name);
        for (std::size_t r = 0; r < rows(); ++r) at(r, c) = vals[r];
    }

    void add_column(const std::string& name, std::vector<double> vals) {
        if (has_column(name)) throw DataError("duplicate column name: " + name);
        if (vals.size() != rows()) throw ValueError("column length does not match row count");
        std::vector<double> merged;
        merged.reserve(rows() * (cols() + 1));
        for (std::size_t r = 0; r < rows(); ++r) {
            for (std::size_t c = 0; c < cols(); ++c) merged.push_back(at(r, c));
            merged.push_back(vals[r]);
        }
        columns_.push_back(name);
        values_ = std::move(merged);
    }

    bool is_hourly() const {
        for (std::size_t i = 1; i < timestamps_.size(); ++i)
            if (timestamps_[i] - timestamps_[i - 1] != kSecondsPerHour) return false;
        return true;
    }

    void require_hourly() const {
        for (std::size_t i = 1; i < timestamps_.size(); ++i)
            if (timestamps_[i] - timestamps_[i - 1] != kSecondsPerHour)
                throw DataError("hourly grid violated after " + format_iso8601_utc(timestamps_[i - 1]));
    }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    void check_range(IndexRange range) const {
        if (range.begin > range.end || range.end > rows()) throw ValueError("row range out of bounds");
    }

    std::vector<std::int64_t> timestamps_;
    std::vector<std::string> columns_;
    std::vector<double> values_;
};

} // namespace lightcast
