#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcast/errors.hpp"
#include "lightcast/timeutil.hpp"

namespace lightcast {

inline void check_metric_inputs(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw ValueError("metrics: length mismatch");
    if (y.empty()) throw ValueError("metrics: empty input");
}

/// Mean absolute error.
inline double mae(std::span<const double> y, std::span<const double> yhat) {
    check_metric_inputs(y, yhat);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
    return s / static_cast<double>(y.size());
}

/// Root mean squared error.
inline double rmse(std::span<const double> y, std::span<const double> yhat) {
    check_metric_inputs(y, yhat);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(y.size()));
}

/// Coefficient of determination; 1 is perfect, can be negative.
inline double r_squared(std::span<const double> y, std::span<const double> yhat) {
    check_metric_inputs(y, yhat);
    double ybar = 0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(y.size());
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    if (ss_tot == 0.0) throw DataError("r_squared: constant observations");
    return 1.0 - ss_res / ss_tot;
}

struct MetricsRow {
    std::string model;
    std::string target;
    std::string split; // "train" | "val" | "test"
    double mae = 0;
    double rmse = 0;
    double r2 = 0;
    std::size_t n = 0;
    double rmse_vs_persistence = 0; // test rows only: rmse / persistence rmse

    nlohmann::json to_json() const {
        nlohmann::json j{{"model", model}, {"target", target}, {"split", split},
                         {"mae", mae},     {"rmse", rmse},     {"r2", r2},
                         {"n", n}};
        if (split == "test") j["rmse_vs_persistence"] = rmse_vs_persistence;
        return j;
    }
};

/// Per-model, per-split, per-target metric table plus run provenance.
struct MetricsReport {
    std::vector<MetricsRow> rows;
    std::int64_t generated_at = 0;
    std::string config_digest;

    const MetricsRow* find(const std::string& model, const std::string& target,
                           const std::string& split) const {
        for (const auto& r : rows)
            if (r.model == model && r.target == target && r.split == split) return &r;
        return nullptr;
    }

    nlohmann::json to_json() const {
        nlohmann::json jrows = nlohmann::json::array();
        for (const auto& r : rows) jrows.push_back(r.to_json());
        return {{"schema", "lightcast.report.v1"},
                {"generated_at", format_iso8601_utc(generated_at)},
                {"config_digest", config_digest},
                {"rows", jrows}};
    }

    static MetricsReport from_json(const nlohmann::json& j) {
        MetricsReport rep;
        rep.generated_at = parse_iso8601_utc(j.at("generated_at").get<std::string>());
        rep.config_digest = j.at("config_digest");
        for (const auto& r : j.at("rows")) {
            MetricsRow row{r.at("model"), r.at("target"), r.at("split"), r.at("mae"),
                           r.at("rmse"),  r.at("r2"),     r.at("n"),     0};
            if (r.contains("rmse_vs_persistence")) row.rmse_vs_persistence = r.at("rmse_vs_persistence");
            rep.rows.push_back(std::move(row));
        }
        return rep;
    }

    /// Aligned text table, one line per (model, target): train and val
    /// MAE/RMSE, then test MAE/RMSE/R2. Models print in the fixed order
    /// fbp, np, sarimax, gbt, persistence; absent cells print "--".
    std::string to_table() const {
        static const std::vector<std::string> model_order = {"fbp", "np", "sarimax", "gbt", "persistence"};
        std::vector<std::string> targets;
        for (const auto& r : rows)
            if (std::find(targets.begin(), targets.end(), r.target) == targets.end())
                targets.push_back(r.target);

        std::ostringstream out;
        out << std::left << std::setw(13) << "Model" << std::setw(9) << "Target";
        for (const char* h : {"TrainMAE", "TrainRMSE", "ValMAE", "ValRMSE", "TestMAE", "TestRMSE", "TestR2"})
            out << std::right << std::setw(11) << h;
        out << '\n';

        auto cell = [&](const MetricsRow* r, double MetricsRow::*field) {
            std::ostringstream s;
            if (r == nullptr)
                s << "--";
            else
                s << std::fixed << std::setprecision(3) << r->*field;
            out << std::right << std::setw(11) << s.str();
        };
        for (const auto& model : model_order) {
            for (const auto& target : targets) {
                const MetricsRow* train = find(model, target, "train");
                const MetricsRow* val = find(model, target, "val");
                const MetricsRow* test = find(model, target, "test");
                if (train == nullptr && val == nullptr && test == nullptr) continue;
                out << std::left << std::setw(13) << model << std::setw(9) << target;
                cell(train, &MetricsRow::mae);
                cell(train, &MetricsRow::rmse);
                cell(val, &MetricsRow::mae);
                cell(val, &MetricsRow::rmse);
                cell(test, &MetricsRow::mae);
                cell(test, &MetricsRow::rmse);
                cell(test, &MetricsRow::r2);
                out << '\n';
            }
        }
        return out.str();
    }
};

} // namespace lightcast
