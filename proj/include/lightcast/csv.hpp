#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lightcast/frame.hpp"

namespace lightcast {

// Interchange format shared by every tool: header "timestamp,<col>,...",
// ISO-8601 UTC timestamps, plain decimal values.

namespace detail {

inline std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view text, std::size_t line_no) {
    double value = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || p != text.data() + text.size())
        throw IoError("line " + std::to_string(line_no) + ": bad numeric value '" + std::string(text) + "'");
    return value;
}

} // namespace detail

inline TimeSeriesFrame load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = detail::split_line(line);
    if (header.empty() || header[0] != "timestamp")
        throw IoError(path + ": first header column must be 'timestamp'");
    std::vector<std::string> columns(header.begin() + 1, header.end());

    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_line(line);
        if (fields.size() != columns.size() + 1)
            throw IoError(path + ": line " + std::to_string(line_no) + ": expected " +
                          std::to_string(columns.size() + 1) + " fields, got " +
                          std::to_string(fields.size()));
        timestamps.push_back(parse_iso8601_utc(fields[0]));
        for (std::size_t i = 1; i < fields.size(); ++i)
            values.push_back(detail::parse_double(fields[i], line_no));
    }
    return TimeSeriesFrame(std::move(timestamps), std::move(columns), std::move(values));
}

inline std::string format_value(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

inline void save_csv(const TimeSeriesFrame& frame, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "timestamp";
    for (const auto& c : frame.columns()) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        out << format_iso8601_utc(frame.timestamps()[r]);
        for (std::size_t c = 0; c < frame.cols(); ++c) out << ',' << format_value(frame.at(r, c));
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace lightcast
