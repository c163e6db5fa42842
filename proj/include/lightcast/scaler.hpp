#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcast/frame.hpp"

namespace lightcast {

/// Per-column standardization x' = (x - mu_train) / sigma_train.
///
/// Statistics come exclusively from rows inside the train range; sigma is the
/// population standard deviation. Target columns stay out of the column list,
/// so they are never touched by transform().
class Scaler {
public:
    static Scaler fit(const TimeSeriesFrame& frame, IndexRange train,
                      const std::vector<std::string>& columns) {
        if (train.empty() || train.end > frame.rows()) throw ValueError("scaler_fit: bad train range");
        Scaler s;
        s.columns_ = columns;
        const double n = static_cast<double>(train.size());
        for (const auto& name : columns) {
            const std::size_t c = frame.column_index(name);
            double sum = 0;
            for (std::size_t r = train.begin; r < train.end; ++r) sum += frame.at(r, c);
            const double mu = sum / n;
            double ss = 0;
            for (std::size_t r = train.begin; r < train.end; ++r) {
                const double d = frame.at(r, c) - mu;
                ss += d * d;
            }
            const double sd = std::sqrt(ss / n);
            if (sd == 0.0) throw DataError("scaler_fit: constant column in train range: " + name);
            s.means_.push_back(mu);
            s.stds_.push_back(sd);
        }
        return s;
    }

    const std::vector<std::string>& columns() const { return columns_; }
    double mean_of(const std::string& name) const { return means_[index(name)]; }
    double std_of(const std::string& name) const { return stds_[index(name)]; }

    TimeSeriesFrame transform(const TimeSeriesFrame& frame) const { return apply(frame, false); }
    TimeSeriesFrame inverse_transform(const TimeSeriesFrame& frame) const { return apply(frame, true); }

    nlohmann::json to_json() const {
        nlohmann::json cols = nlohmann::json::object();
        for (std::size_t i = 0; i < columns_.size(); ++i)
            cols[columns_[i]] = {{"mean", means_[i]}, {"std", stds_[i]}};
        return {{"columns", columns_}, {"stats", cols}};
    }

    static Scaler from_json(const nlohmann::json& j) {
        Scaler s;
        for (const auto& name : j.at("columns")) {
            const auto& st = j.at("stats").at(name.get<std::string>());
            s.columns_.push_back(name.get<std::string>());
            s.means_.push_back(st.at("mean").get<double>());
            s.stds_.push_back(st.at("std").get<double>());
        }
        return s;
    }

private:
    TimeSeriesFrame apply(const TimeSeriesFrame& frame, bool inverse) const {
        TimeSeriesFrame out = frame;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            const std::size_t c = out.column_index(columns_[i]); // throws on missing column
            for (std::size_t r = 0; r < out.rows(); ++r) {
                const double v = out.at(r, c);
                out.at(r, c) = inverse ? v * stds_[i] + means_[i] : (v - means_[i]) / stds_[i];
            }
        }
        return out;
    }

    std::size_t index(const std::string& name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == name) return i;
        throw ValueError("scaler has no column: " + name);
    }

    std::vector<std::string> columns_;
    std::vector<double> means_;
    std::vector<double> stds_;
};

} // namespace lightcast
