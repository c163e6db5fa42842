#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lightcast/csv.hpp"
#include "lightcast/feature_selection.hpp"
#include "lightcast/ingest.hpp"
#include "lightcast/metrics.hpp"
#include "lightcast/preprocess.hpp"
#include "lightcast/run_config.hpp"
#include "lightcast/scaler.hpp"
#include "lightcast/split.hpp"
#include "lightcast/svg_plots.hpp"

namespace lightcast {

struct BenchmarkResult {
    MetricsReport report;
    std::map<std::pair<std::string, std::string>, std::vector<double>> test_forecasts; // (model, target)
    std::map<std::string, std::vector<double>> test_actuals;
    std::vector<std::int64_t> test_timestamps;
    std::map<std::string, std::vector<std::string>> regressors_used;
    std::vector<std::string> artifact_paths;
    std::size_t anomalies_replaced = 0;
    std::size_t gaps_filled = 0;
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const std::exception& e) {
        throw Error(std::string("stage ") + name + ": " + e.what());
    }
}

struct ModelOutput {
    // predictions with the frame rows they correspond to
    std::vector<double> train_pred;
    IndexRange train_rows{0, 0};
    std::vector<double> val_pred;
    IndexRange val_rows{0, 0};
    std::vector<double> test_pred;
    nlohmann::json model_doc;
};

struct TargetData {
    std::vector<std::string> regressors;
    Scaler scaler;
    TimeSeriesFrame scaled; // regressors standardized, targets raw
};

inline nlohmann::json wrap_model_doc(const std::string& kind, const std::string& target,
                                     const TargetData& data, nlohmann::json model_json) {
    return {{"schema", "lightcast.model.v1"},
            {"kind", kind},
            {"target", target},
            {"regressors", data.regressors},
            {"scaler", data.scaler.to_json()},
            {"model", std::move(model_json)}};
}

inline ModelOutput run_fbp(const RunConfig& config, const TargetData& data, const std::string& target,
                           const SplitIndices& split) {
    const IndexRange fit_range = config.fbp_fit_on_train_plus_val
                                     ? IndexRange{split.train.begin, split.val.end}
                                     : split.train;
    const auto model = fit_additive(config.additive_config(data.regressors), data.scaled, target, fit_range);
    ModelOutput out;
    out.train_rows = split.train;
    out.train_pred = predict_additive(model, data.scaled, split.train);
    if (!config.fbp_fit_on_train_plus_val) {
        out.val_rows = split.val;
        out.val_pred = predict_additive(model, data.scaled, split.val);
    }
    out.test_pred = predict_additive(model, data.scaled, split.test);
    out.model_doc = model.to_json();
    return out;
}

inline ModelOutput run_np(const RunConfig& config, const TargetData& data, const std::string& target,
                          const SplitIndices& split) {
    const ARAdditiveConfig ar_config = config.ar_config(data.regressors);
    const auto model = fit_ar_additive(ar_config, data.scaled, target, split.train);
    const std::size_t max_lag = static_cast<std::size_t>(
        std::max(ar_config.n_lags, ar_config.regressor_lags));
    ModelOutput out;
    out.train_rows = {split.train.begin + max_lag, split.train.end};
    out.train_pred = predict_ar_one_step(model, data.scaled, target, out.train_rows);
    out.val_rows = split.val;
    out.val_pred = predict_ar_one_step(model, data.scaled, target, split.val);
    const auto history = data.scaled.slice_rows({0, split.test.begin});
    const auto future = data.scaled.slice_rows(split.test).drop_column(target);
    out.test_pred = predict_ar_additive(model, history, future, target);
    out.model_doc = model.to_json();
    return out;
}

inline ModelOutput run_sarimax(const RunConfig& config, const TargetData& data, const std::string& target,
                               const SplitIndices& split) {
    const auto order = config.sarimax_order();
    auto params = fit_sarimax(order, data.scaled, target, data.regressors, split.train);
    const std::size_t warmup = static_cast<std::size_t>(order.warmup());
    ModelOutput out;
    out.train_rows = {split.train.begin + warmup, split.train.end};
    out.train_pred = sarimax_one_step(params, data.scaled, target, split.train.begin, out.train_rows);
    out.val_rows = split.val;
    out.val_pred = sarimax_one_step(params, data.scaled, target, split.train.begin, split.val);

    // forecast from the end of val: advance the residual/innovation tails
    const auto advanced =
        advance_sarimax_tails(params, data.scaled, target, split.train.begin, split.val.end);
    std::vector<double> future_exog;
    future_exog.reserve(split.test.size() * data.regressors.size());
    for (std::size_t row = split.test.begin; row < split.test.end; ++row)
        for (const auto& reg : data.regressors)
            future_exog.push_back(data.scaled.at(row, data.scaled.column_index(reg)));
    out.test_pred = forecast_sarimax(advanced, split.test.size(), future_exog);
    out.model_doc = advanced.to_json();
    return out;
}

inline ModelOutput run_gbt(const RunConfig& config, const TargetData& data, const std::string& target,
                           const SplitIndices& split) {
    const GbtConfig gbt_config = config.gbt_config(data.regressors);
    const auto all = build_tabular_features(data.scaled, target, gbt_config);
    const auto train_ds = all.filter_by_frame_rows(split.train);
    const auto val_ds = all.filter_by_frame_rows(split.val);
    const auto ensemble = fit_gbt(gbt_config, train_ds, val_ds);

    ModelOutput out;
    out.train_rows = {train_ds.frame_rows.front(), train_ds.frame_rows.back() + 1};
    out.train_pred = predict_gbt(ensemble, train_ds);
    out.val_rows = split.val;
    out.val_pred = predict_gbt(ensemble, val_ds);
    const auto history_tail = data.scaled.column_slice(target, {0, split.test.begin});
    const auto future = data.scaled.slice_rows(split.test).drop_column(target);
    out.test_pred = forecast_gbt(ensemble, history_tail, future);
    out.model_doc = ensemble.to_json();
    return out;
}

inline ModelOutput run_model(const std::string& kind, const RunConfig& config, const TargetData& data,
                             const std::string& target, const SplitIndices& split) {
    if (kind == "fbp") return run_fbp(config, data, target, split);
    if (kind == "np") return run_np(config, data, target, split);
    if (kind == "sarimax") return run_sarimax(config, data, target, split);
    if (kind == "gbt") return run_gbt(config, data, target, split);
    throw ValueError("unknown model: " + kind);
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

} // namespace detail

/// Resolves the configured data source to a raw hourly frame.
inline TimeSeriesFrame acquire_frame(const RunConfig& config, const IngestOptions& ingest) {
    switch (config.source) {
        case SourceKind::synthetic:
            return generate_synthetic(config.synthetic_config());
        case SourceKind::cache:
            return load_csv(config.cache_path);
        case SourceKind::fixture:
        case SourceKind::live: {
            ProviderQuery query;
            query.latitude = config.latitude;
            query.longitude = config.longitude;
            if (!config.start || !config.end)
                throw ValueError("live/fixture source needs a start and end date");
            query.start = *config.start;
            query.end = *config.end;
            if (const char* key = std::getenv("OPENWEATHER_API_KEY")) query.api_key = std::string(key);
            IngestOptions options = ingest;
            options.mode = config.source == SourceKind::live ? FetchMode::live : FetchMode::fixture;
            if (options.fixture_dir.empty()) options.fixture_dir = config.fixture_dir;
            const auto pollutants = fetch_pollutants(query, options);
            const auto weather = fetch_weather(query, options);
            return merge_sources(pollutants, weather);
        }
    }
    throw ValueError("unhandled data source");
}

/// The full pipeline: acquire, grid-enforce, anomaly-filter, split, select
/// features on train rows, fit the train-only scaler, run every enabled model
/// for every target, and assemble the report plus artifacts under out_dir.
/// Every random choice is seeded from the config, so identical configs give
/// byte-identical outputs.
inline BenchmarkResult run_benchmark(const RunConfig& config, const IngestOptions& ingest = {}) {
    namespace fs = std::filesystem;
    config.validate();
    BenchmarkResult result;

    const TimeSeriesFrame raw =
        detail::stage("ingest", [&] { return acquire_frame(config, ingest); });

    TimeSeriesFrame frame = detail::stage("preprocess", [&] {
        auto grid = enforce_hourly_grid(raw);
        result.gaps_filled = grid.filled.size();
        auto filtered = zscore_filter(grid.frame, config.anomaly_threshold);
        result.anomalies_replaced = filtered.replaced;
        return std::move(filtered.frame);
    });

    const SplitIndices split = detail::stage("split", [&] { return chronological_split(frame); });

    // per-target feature selection (train rows only) and scaling
    std::map<std::string, SelectionState> selections;
    std::map<std::string, detail::TargetData> target_data;
    detail::stage("feature-selection", [&] {
        for (const auto& target : config.targets) {
            detail::TargetData data;
            const auto it = config.explicit_regressors.find(target);
            if (it != config.explicit_regressors.end()) {
                data.regressors = it->second;
            } else {
                std::vector<std::string> pool;
                for (const auto& name : config.candidates)
                    if (name != target && frame.has_column(name)) pool.push_back(name);
                if (pool.empty()) throw ValueError("no usable candidate features for " + target);
                const std::size_t k = std::min(config.top_k, pool.size());
                auto state = mrmr_select(frame, target, pool, k, split.train);
                data.regressors = state.selected;
                selections.emplace(target, std::move(state));
            }
            target_data.emplace(target, std::move(data));
        }
        return 0;
    });
    detail::stage("scaling", [&] {
        for (auto& [target, data] : target_data) {
            data.scaler = Scaler::fit(frame, split.train, data.regressors);
            data.scaled = data.scaler.transform(frame);
        }
        return 0;
    });

    // fixed report order regardless of config order
    static const std::vector<std::string> kModelOrder = {"fbp", "np", "sarimax", "gbt"};
    std::vector<std::string> models;
    for (const auto& m : kModelOrder)
        for (const auto& enabled : config.enabled_models)
            if (m == enabled) models.push_back(m);

    // model runs are independent: launch in parallel, assemble in fixed order
    std::map<std::pair<std::string, std::string>, std::future<detail::ModelOutput>> futures;
    for (const auto& model : models)
        for (const auto& target : config.targets) {
            const detail::TargetData* data = &target_data.at(target);
            futures.emplace(std::make_pair(model, target),
                            std::async(std::launch::async, [&config, &split, data, model, target] {
                                return detail::run_model(model, config, *data, target, split);
                            }));
        }
    std::map<std::pair<std::string, std::string>, detail::ModelOutput> outputs;
    for (auto& [key, future] : futures) {
        try {
            outputs.emplace(key, future.get());
        } catch (const std::exception& e) {
            throw Error("stage model " + key.first + "/" + key.second + ": " + e.what());
        }
    }

    // metrics assembly
    MetricsReport& report = result.report;
    report.config_digest = config.digest();
    if (config.run_timestamp) {
        report.generated_at = *config.run_timestamp;
    } else if (config.source == SourceKind::live) {
        report.generated_at =
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
    } else {
        report.generated_at = frame.timestamps().back(); // deterministic for offline sources
    }

    result.test_timestamps.assign(frame.timestamps().begin() + static_cast<std::ptrdiff_t>(split.test.begin),
                                  frame.timestamps().end());
    std::map<std::string, double> persistence_rmse;
    for (const auto& target : config.targets) {
        const auto actual = frame.column_slice(target, split.test);
        result.test_actuals[target] = actual;
        // persistence: repeat the last observed train value across the horizon
        const std::vector<double> persist(split.test.size(),
                                          frame.at(split.train.end - 1, frame.column_index(target)));
        persistence_rmse[target] = rmse(actual, persist);
        result.test_forecasts[{"persistence", target}] = persist;
    }

    detail::stage("report", [&] {
        for (const auto& model : models) {
            for (const auto& target : config.targets) {
                const auto& out = outputs.at({model, target});
                const auto train_actual = frame.column_slice(target, out.train_rows);
                report.rows.push_back({model, target, "train", mae(train_actual, out.train_pred),
                                       rmse(train_actual, out.train_pred),
                                       r_squared(train_actual, out.train_pred), out.train_pred.size(), 0});
                if (!out.val_pred.empty()) {
                    const auto val_actual = frame.column_slice(target, out.val_rows);
                    report.rows.push_back({model, target, "val", mae(val_actual, out.val_pred),
                                           rmse(val_actual, out.val_pred),
                                           r_squared(val_actual, out.val_pred), out.val_pred.size(), 0});
                }
                const auto& test_actual = result.test_actuals.at(target);
                MetricsRow row{model,
                               target,
                               "test",
                               mae(test_actual, out.test_pred),
                               rmse(test_actual, out.test_pred),
                               r_squared(test_actual, out.test_pred),
                               out.test_pred.size(),
                               0};
                row.rmse_vs_persistence = row.rmse / persistence_rmse.at(target);
                report.rows.push_back(row);
                result.test_forecasts[{model, target}] = out.test_pred;
            }
        }
        for (const auto& target : config.targets) {
            MetricsRow row{"persistence", target, "test", 0, 0, 0, split.test.size(), 1.0};
            const auto& actual = result.test_actuals.at(target);
            const auto& persist = result.test_forecasts.at({"persistence", target});
            row.mae = mae(actual, persist);
            row.rmse = rmse(actual, persist);
            row.r2 = r_squared(actual, persist);
            report.rows.push_back(row);
        }
        return 0;
    });

    for (const auto& [target, data] : target_data) result.regressors_used[target] = data.regressors;

    // artifacts
    detail::stage("artifacts", [&] {
        fs::create_directories(config.out_dir);
        fs::create_directories(config.out_dir + "/models");
        fs::create_directories(config.out_dir + "/plots");
        fs::create_directories(config.out_dir + "/forecasts");

        const std::string report_json_path = config.out_dir + "/report.json";
        detail::write_text(report_json_path, report.to_json().dump(2) + "\n");
        result.artifact_paths.push_back(report_json_path);

        const std::string report_txt_path = config.out_dir + "/report.txt";
        detail::write_text(report_txt_path,
                           "config digest: " + report.config_digest + "\n\n" + report.to_table());
        result.artifact_paths.push_back(report_txt_path);

        for (const auto& model : models)
            for (const auto& target : config.targets) {
                const auto& out = outputs.at({model, target});
                const std::string path = config.out_dir + "/models/" + model + "_" + target + ".json";
                detail::write_text(path, detail::wrap_model_doc(model, target, target_data.at(target),
                                                                out.model_doc)
                                                 .dump(2) +
                                             "\n");
                result.artifact_paths.push_back(path);

                TimeSeriesFrame forecast_frame(result.test_timestamps, {target}, out.test_pred);
                const std::string csv_path =
                    config.out_dir + "/forecasts/" + model + "_" + target + ".csv";
                save_csv(forecast_frame, csv_path);
                result.artifact_paths.push_back(csv_path);
            }

        for (const auto& [target, state] : selections) {
            const std::string path = config.out_dir + "/selection_" + target + ".json";
            detail::write_text(path, state.to_json().dump(2) + "\n");
            result.artifact_paths.push_back(path);
        }

        std::map<std::pair<std::string, std::string>, std::vector<double>> model_forecasts;
        for (const auto& [key, forecast] : result.test_forecasts)
            if (key.first != "persistence") model_forecasts[key] = forecast;
        auto plot_paths = emit_plots(report, model_forecasts, result.test_actuals,
                                     config.out_dir + "/plots");
        result.artifact_paths.insert(result.artifact_paths.end(), plot_paths.begin(), plot_paths.end());
        return 0;
    });

    return result;
}

} // namespace lightcast
