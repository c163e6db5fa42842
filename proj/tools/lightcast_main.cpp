// lightcast: leakage-safe hourly air-quality forecasting toolkit.
//
// Subcommands wire the library into one workflow: fetch -> preprocess ->
// select-features -> train -> forecast -> evaluate, with `bench` running the
// whole pipeline end to end. Exit codes: 0 success, 1 usage error, 2 runtime
// failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lightcast/benchmark.hpp"
#include "lightcast/csv.hpp"
#include "lightcast/http_transport.hpp"
#include "lightcast/run_config.hpp"

namespace {

using namespace lightcast;

RunConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return RunConfig::load(path);
}

IngestOptions default_ingest_options() {
    IngestOptions options;
    options.http_get = make_http_transport();
    return options;
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos
                                                                         : comma - start);
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string source;

    RunConfig resolve() const {
        RunConfig config = load_config_or_default(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (seed) config.seed = *seed;
        if (!source.empty()) config.source = source_kind_from_string(source);
        config.validate();
        return config;
    }
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "TOML or JSON run configuration");
    cmd->add_option("--out", flags.out_dir, "output directory (overrides the config)");
    cmd->add_option("--seed", flags.seed, "global random seed (overrides the config)");
    cmd->add_option("--source", flags.source, "data source: live|cache|fixture|synthetic")
        ->check(CLI::IsMember({"live", "cache", "fixture", "synthetic"}));
}

int cmd_fetch(const CommonFlags& flags) {
    const RunConfig config = flags.resolve();
    const auto frame = acquire_frame(config, default_ingest_options());
    std::filesystem::create_directories(config.out_dir);
    const std::string path = config.out_dir + "/data.csv";
    save_csv(frame, path);
    std::cout << "wrote " << path << " (" << frame.rows() << " rows, " << frame.cols()
              << " columns)\n";
    return 0;
}

int cmd_preprocess(const std::string& in_path, const std::string& out_path, double threshold) {
    const auto raw = load_csv(in_path);
    const auto grid = enforce_hourly_grid(raw);
    const auto filtered = zscore_filter(grid.frame, threshold);
    save_csv(filtered.frame, out_path);
    std::cout << "gaps filled: " << grid.filled.size() << "\n"
              << "anomalies replaced (|z| > " << threshold << "): " << filtered.replaced << "\n";
    for (const auto& col : filtered.zero_variance)
        std::cout << "zero-variance column left untouched: " << col << "\n";
    std::cout << "wrote " << out_path << " (" << filtered.frame.rows() << " rows)\n";
    return 0;
}

int cmd_select_features(const std::string& in_path, const std::string& target,
                        const std::string& candidates_text, std::size_t k,
                        const std::string& out_path) {
    const auto frame = load_csv(in_path);
    std::vector<std::string> candidates = split_csv_list(candidates_text);
    if (candidates.empty())
        for (const auto& col : frame.columns())
            if (col != target) candidates.push_back(col);

    // statistics on train rows only; fall back to all rows for short files
    IndexRange rows{0, frame.rows()};
    std::string rows_used = "all";
    try {
        rows = chronological_split(frame).train;
        rows_used = "train";
    } catch (const DataError&) {
    }

    auto state = mrmr_select(frame, target, candidates, std::min(k, candidates.size()), rows);
    nlohmann::json j = state.to_json();
    j["target"] = target;
    j["rows_used"] = rows_used;
    const std::string text = j.dump(2) + "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << text;
        std::cout << "wrote " << out_path << "\n";
    } else {
        std::cout << text;
    }
    return 0;
}

std::vector<std::string> resolve_regressors(const RunConfig& config, const TimeSeriesFrame& frame,
                                            const std::string& target, IndexRange train) {
    const auto it = config.explicit_regressors.find(target);
    if (it != config.explicit_regressors.end()) return it->second;
    std::vector<std::string> pool;
    for (const auto& name : config.candidates)
        if (name != target && frame.has_column(name)) pool.push_back(name);
    if (pool.empty()) throw ValueError("no usable candidate features for " + target);
    return mrmr_select(frame, target, pool, std::min(config.top_k, pool.size()), train).selected;
}

int cmd_train(const CommonFlags& flags, const std::string& in_path, const std::string& model_kind,
              const std::string& target, const std::string& out_file) {
    const RunConfig config = flags.resolve();
    const auto frame = load_csv(in_path);
    const auto split = chronological_split(frame);
    const auto regressors = resolve_regressors(config, frame, target, split.train);

    const Scaler scaler = Scaler::fit(frame, split.train, regressors);
    const auto scaled = scaler.transform(frame);

    nlohmann::json model_json;
    if (model_kind == "fbp") {
        const IndexRange fit_range = config.fbp_fit_on_train_plus_val
                                         ? IndexRange{split.train.begin, split.val.end}
                                         : split.train;
        model_json = fit_additive(config.additive_config(regressors), scaled, target, fit_range).to_json();
    } else if (model_kind == "np") {
        model_json = fit_ar_additive(config.ar_config(regressors), scaled, target, split.train).to_json();
    } else if (model_kind == "sarimax") {
        auto params = fit_sarimax(config.sarimax_order(), scaled, target, regressors, split.train);
        model_json = params.to_json();
    } else {
        const auto gbt = config.gbt_config(regressors);
        const auto all = build_tabular_features(scaled, target, gbt);
        model_json = fit_gbt(gbt, all.filter_by_frame_rows(split.train),
                             all.filter_by_frame_rows(split.val))
                         .to_json();
    }

    nlohmann::json doc{{"schema", "lightcast.model.v1"}, {"kind", model_kind},
                       {"target", target},              {"regressors", regressors},
                       {"scaler", scaler.to_json()},    {"model", model_json}};
    std::ofstream out(out_file);
    if (!out) throw IoError("cannot write " + out_file);
    out << doc.dump(2) << "\n";
    std::cout << "trained " << model_kind << " for " << target << " on rows [0, " << split.train.end
              << "); regressors:";
    for (const auto& r : regressors) std::cout << ' ' << r;
    std::cout << "\nwrote " << out_file << "\n";
    return 0;
}

int cmd_forecast(const std::string& model_file, const std::string& in_path, std::size_t horizon,
                 const std::string& out_file) {
    std::ifstream in(model_file);
    if (!in) throw IoError("cannot open " + model_file);
    nlohmann::json doc;
    in >> doc;
    if (doc.value("schema", "") != "lightcast.model.v1")
        throw IoError(model_file + ": not a lightcast model document");
    const std::string kind = doc.at("kind");
    const std::string target = doc.at("target");
    const Scaler scaler = Scaler::from_json(doc.at("scaler"));

    const auto frame = load_csv(in_path);
    if (horizon < 1) throw ValueError("horizon must be >= 1");
    if (frame.rows() <= horizon) throw ValueError("input has no history rows before the horizon");
    const auto scaled = scaler.transform(frame);
    const IndexRange future_rows{frame.rows() - horizon, frame.rows()};

    std::vector<double> forecast;
    if (kind == "fbp") {
        const auto model = AdditiveModel::from_json(doc.at("model"));
        forecast = predict_additive(model, scaled, future_rows);
    } else if (kind == "np") {
        const auto model = ARAdditiveModel::from_json(doc.at("model"));
        const auto history = scaled.slice_rows({0, future_rows.begin});
        const auto future = scaled.slice_rows(future_rows).drop_column(target);
        forecast = predict_ar_additive(model, history, future, target);
    } else if (kind == "sarimax") {
        auto params = SarimaxParams::from_json(doc.at("model"));
        params = advance_sarimax_tails(params, scaled, target, 0, future_rows.begin);
        std::vector<double> exog;
        for (std::size_t row = future_rows.begin; row < future_rows.end; ++row)
            for (const auto& name : params.exog) exog.push_back(scaled.at(row, scaled.column_index(name)));
        forecast = forecast_sarimax(params, horizon, exog);
    } else if (kind == "gbt") {
        const auto ensemble = GbtEnsemble::from_json(doc.at("model"));
        const auto history_tail = scaled.column_slice(target, {0, future_rows.begin});
        const auto future = scaled.slice_rows(future_rows).drop_column(target);
        forecast = forecast_gbt(ensemble, history_tail, future);
    } else {
        throw IoError("unknown model kind: " + kind);
    }

    std::vector<std::int64_t> ts(frame.timestamps().begin() + static_cast<std::ptrdiff_t>(future_rows.begin),
                                 frame.timestamps().end());
    save_csv(TimeSeriesFrame(std::move(ts), {target}, std::move(forecast)), out_file);
    std::cout << "wrote " << out_file << " (" << horizon << " rows)\n";
    return 0;
}

int cmd_evaluate(const std::string& forecast_path, const std::string& actual_path,
                 std::string target) {
    const auto forecast = load_csv(forecast_path);
    const auto actual = load_csv(actual_path);
    if (target.empty()) target = forecast.columns().at(0);

    const std::size_t fc = forecast.column_index(target);
    const std::size_t ac = actual.column_index(target);
    std::vector<double> y, yhat;
    std::size_t ia = 0;
    for (std::size_t r = 0; r < forecast.rows(); ++r) {
        const std::int64_t ts = forecast.timestamps()[r];
        while (ia < actual.rows() && actual.timestamps()[ia] < ts) ++ia;
        if (ia < actual.rows() && actual.timestamps()[ia] == ts) {
            yhat.push_back(forecast.at(r, fc));
            y.push_back(actual.at(ia, ac));
        }
    }
    if (y.empty()) throw DataError("evaluate: no overlapping timestamps");

    nlohmann::json j{{"target", target},     {"n", y.size()},   {"mae", mae(y, yhat)},
                     {"rmse", rmse(y, yhat)}, {"r2", r_squared(y, yhat)}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_bench(const CommonFlags& flags) {
    const RunConfig config = flags.resolve();
    const auto result = run_benchmark(config, default_ingest_options());
    std::cout << result.report.to_table() << "\n";
    for (const auto& [target, regressors] : result.regressors_used) {
        std::cout << target << " regressors:";
        for (const auto& r : regressors) std::cout << ' ' << r;
        std::cout << "\n";
    }
    std::cout << "config digest: " << result.report.config_digest << "\n"
              << "artifacts in " << config.out_dir << " (" << result.artifact_paths.size()
              << " files)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lightcast: leakage-safe hourly air-quality forecasting toolkit"};
    app.require_subcommand(1);

    CommonFlags fetch_flags;
    auto* fetch = app.add_subcommand("fetch", "fetch or generate data and cache it as CSV");
    add_common_flags(fetch, fetch_flags);

    std::string pre_in, pre_out;
    double pre_threshold = 5.0;
    auto* preprocess = app.add_subcommand("preprocess", "enforce the hourly grid and filter anomalies");
    preprocess->add_option("--in", pre_in, "input CSV")->required();
    preprocess->add_option("--out-file", pre_out, "output CSV")->required();
    preprocess->add_option("--threshold", pre_threshold, "z-score threshold (default 5)");

    std::string sel_in, sel_target, sel_candidates, sel_out;
    std::size_t sel_k = 5;
    auto* select = app.add_subcommand("select-features", "greedy mRMR feature selection report");
    select->add_option("--in", sel_in, "input CSV")->required();
    select->add_option("--target", sel_target, "target column")->required();
    select->add_option("--candidates", sel_candidates, "comma-separated candidate columns");
    select->add_option("--k", sel_k, "number of features to select");
    select->add_option("--out-file", sel_out, "write the JSON report here instead of stdout");

    CommonFlags train_flags;
    std::string train_in, train_model, train_target, train_out = "model.json";
    auto* train = app.add_subcommand("train", "fit one model and save it as JSON");
    add_common_flags(train, train_flags);
    train->add_option("--in", train_in, "input CSV")->required();
    train->add_option("--model", train_model, "fbp|np|sarimax|gbt")
        ->required()
        ->check(CLI::IsMember({"fbp", "np", "sarimax", "gbt"}));
    train->add_option("--target", train_target, "target column (e.g. pm2_5 or pm10)")->required();
    train->add_option("--out-file", train_out, "model document path");

    std::string fc_model, fc_in, fc_out = "forecast.csv";
    std::size_t fc_horizon = 168;
    auto* forecast = app.add_subcommand("forecast", "forecast the last --horizon rows of a CSV");
    forecast->add_option("--model-file", fc_model, "trained model JSON")->required();
    forecast->add_option("--in", fc_in, "CSV with history plus future regressor rows")->required();
    forecast->add_option("--horizon", fc_horizon, "forecast horizon in hours (default 168)");
    forecast->add_option("--out-file", fc_out, "forecast CSV path");

    std::string ev_forecast, ev_actual, ev_target;
    auto* evaluate = app.add_subcommand("evaluate", "compare a forecast CSV against actuals");
    evaluate->add_option("--forecast", ev_forecast, "forecast CSV")->required();
    evaluate->add_option("--actual", ev_actual, "actuals CSV")->required();
    evaluate->add_option("--target", ev_target, "column to score (default: forecast's column)");

    CommonFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "run the full benchmark pipeline");
    add_common_flags(bench, bench_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (fetch->parsed()) return cmd_fetch(fetch_flags);
        if (preprocess->parsed()) return cmd_preprocess(pre_in, pre_out, pre_threshold);
        if (select->parsed())
            return cmd_select_features(sel_in, sel_target, sel_candidates, sel_k, sel_out);
        if (train->parsed())
            return cmd_train(train_flags, train_in, train_model, train_target, train_out);
        if (forecast->parsed()) return cmd_forecast(fc_model, fc_in, fc_horizon, fc_out);
        if (evaluate->parsed()) return cmd_evaluate(ev_forecast, ev_actual, ev_target);
        if (bench->parsed()) return cmd_bench(bench_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
