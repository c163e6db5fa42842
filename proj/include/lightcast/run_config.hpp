#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcast/additive.hpp"
#include "lightcast/ar_additive.hpp"
#include "lightcast/gbt.hpp"
#include "lightcast/sarimax.hpp"
#include "lightcast/synthetic.hpp"
#include "lightcast/timeutil.hpp"
#include "lightcast/toml_lite.hpp"

namespace lightcast {

enum class SourceKind { live, cache, fixture, synthetic };

inline SourceKind source_kind_from_string(const std::string& s) {
    if (s == "live") return SourceKind::live;
    if (s == "cache") return SourceKind::cache;
    if (s == "fixture") return SourceKind::fixture;
    if (s == "synthetic") return SourceKind::synthetic;
    throw ValueError("unknown data source: " + s);
}

inline const char* to_string(SourceKind k) {
    switch (k) {
        case SourceKind::live: return "live";
        case SourceKind::cache: return "cache";
        case SourceKind::fixture: return "fixture";
        case SourceKind::synthetic: return "synthetic";
    }
    return "?";
}

/// Everything one benchmark run needs, loadable from TOML or JSON. CLI flags
/// override file values; secrets come only from the environment.
struct RunConfig {
    // data source (exactly one active)
    SourceKind source = SourceKind::synthetic;
    std::string cache_path;
    std::string fixture_dir;
    double latitude = 39.9042; // Beijing by default
    double longitude = 116.4074;
    std::optional<std::int64_t> start;
    std::optional<std::int64_t> end;
    std::size_t synthetic_rows = 6000;

    // preprocessing
    double anomaly_threshold = 5.0;

    // feature selection
    std::vector<std::string> targets = {"pm2_5", "pm10"};
    std::vector<std::string> candidates = {"pm2_5", "pm10", "co",   "no",  "no2",
                                           "so2",   "nh3",  "o3",   "temp", "dew_point"};
    std::size_t top_k = 5;
    std::map<std::string, std::vector<std::string>> explicit_regressors; // per-target override

    // models
    std::vector<std::string> enabled_models = {"fbp", "np", "sarimax", "gbt"};
    int fbp_n_changepoints = 25;
    double fbp_changepoint_range = 0.8;
    int weekly_order = 3;
    int yearly_order = 10;
    int daily_order = 0; // daily cycles disabled by default
    double trend_penalty = 10.0;
    double regressor_penalty = 0.0;
    bool fbp_fit_on_train_plus_val = false;
    int np_n_lags = 7;
    int np_regressor_lags = 0;
    int sarimax_period = 24;
    GbtConfig gbt;

    // run
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    std::optional<std::int64_t> run_timestamp;

    AdditiveConfig additive_config(const std::vector<std::string>& regressors) const {
        AdditiveConfig c;
        c.n_changepoints = fbp_n_changepoints;
        c.changepoint_range = fbp_changepoint_range;
        c.seasonalities.clear();
        if (weekly_order > 0) c.seasonalities.push_back({"weekly", 168.0, weekly_order});
        if (yearly_order > 0) c.seasonalities.push_back({"yearly", 8766.0, yearly_order});
        if (daily_order > 0) c.seasonalities.push_back({"daily", 24.0, daily_order});
        c.regressors = regressors;
        c.trend_penalty = trend_penalty;
        c.regressor_penalty = regressor_penalty;
        return c;
    }

    ARAdditiveConfig ar_config(const std::vector<std::string>& regressors) const {
        ARAdditiveConfig c;
        c.base = additive_config(regressors);
        c.n_lags = np_n_lags;
        c.regressor_lags = np_regressor_lags;
        return c;
    }

    SarimaxOrder sarimax_order() const { return {1, 0, 1, 1, 0, 1, sarimax_period}; }

    GbtConfig gbt_config(const std::vector<std::string>& regressors) const {
        GbtConfig c = gbt;
        c.regressors = regressors;
        return c;
    }

    SyntheticConfig synthetic_config() const {
        SyntheticConfig c;
        c.n_rows = synthetic_rows;
        c.seed = seed;
        if (start) c.start_timestamp = *start;
        return c;
    }

    void validate() const {
        if (targets.empty()) throw ValueError("config: at least one target required");
        if (enabled_models.empty()) throw ValueError("config: enabled model list is empty");
        for (const auto& m : enabled_models)
            if (m != "fbp" && m != "np" && m != "sarimax" && m != "gbt")
                throw ValueError("config: unknown model " + m);
        if (source == SourceKind::cache && cache_path.empty())
            throw ValueError("config: cache source needs cache_path");
        if (anomaly_threshold <= 0) throw ValueError("config: anomaly_threshold must be positive");
        if (top_k == 0) throw ValueError("config: top_k must be positive");
        for (const auto& [target, regressors] : explicit_regressors)
            for (const auto& r : regressors)
                if (r == target) throw ValueError("config: " + target + " cannot be its own regressor");
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        const auto get = [](const nlohmann::json& obj, const char* key) -> const nlohmann::json* {
            const auto it = obj.find(key);
            return it == obj.end() ? nullptr : &*it;
        };
        if (const auto* data = get(j, "data")) {
            if (const auto* v = get(*data, "source")) c.source = source_kind_from_string(*v);
            if (const auto* v = get(*data, "cache_path")) c.cache_path = *v;
            if (const auto* v = get(*data, "fixture_dir")) c.fixture_dir = *v;
            if (const auto* v = get(*data, "latitude")) c.latitude = *v;
            if (const auto* v = get(*data, "longitude")) c.longitude = *v;
            if (const auto* v = get(*data, "start")) c.start = parse_iso8601_utc(v->get<std::string>());
            if (const auto* v = get(*data, "end")) c.end = parse_iso8601_utc(v->get<std::string>());
        }
        if (const auto* synth = get(j, "synthetic")) {
            if (const auto* v = get(*synth, "rows")) c.synthetic_rows = *v;
        }
        if (const auto* pre = get(j, "preprocess")) {
            if (const auto* v = get(*pre, "anomaly_threshold")) c.anomaly_threshold = *v;
        }
        if (const auto* feat = get(j, "features")) {
            if (const auto* v = get(*feat, "targets")) c.targets = v->get<std::vector<std::string>>();
            if (const auto* v = get(*feat, "candidates")) c.candidates = v->get<std::vector<std::string>>();
            if (const auto* v = get(*feat, "top_k")) c.top_k = *v;
            if (const auto* v = get(*feat, "regressors"))
                for (const auto& [target, list] : v->items())
                    c.explicit_regressors[target] = list.get<std::vector<std::string>>();
        }
        if (const auto* models = get(j, "models")) {
            if (const auto* v = get(*models, "enabled")) c.enabled_models = v->get<std::vector<std::string>>();
            if (const auto* fbp = get(*models, "fbp")) {
                if (const auto* v = get(*fbp, "n_changepoints")) c.fbp_n_changepoints = *v;
                if (const auto* v = get(*fbp, "changepoint_range")) c.fbp_changepoint_range = *v;
                if (const auto* v = get(*fbp, "weekly_order")) c.weekly_order = *v;
                if (const auto* v = get(*fbp, "yearly_order")) c.yearly_order = *v;
                if (const auto* v = get(*fbp, "daily_order")) c.daily_order = *v;
                if (const auto* v = get(*fbp, "trend_penalty")) c.trend_penalty = *v;
                if (const auto* v = get(*fbp, "regressor_penalty")) c.regressor_penalty = *v;
                if (const auto* v = get(*fbp, "fit_on_train_plus_val")) c.fbp_fit_on_train_plus_val = *v;
            }
            if (const auto* np = get(*models, "np")) {
                if (const auto* v = get(*np, "n_lags")) c.np_n_lags = *v;
                if (const auto* v = get(*np, "regressor_lags")) c.np_regressor_lags = *v;
            }
            if (const auto* sx = get(*models, "sarimax")) {
                if (const auto* v = get(*sx, "seasonal_period")) c.sarimax_period = *v;
            }
            if (const auto* g = get(*models, "gbt")) {
                if (const auto* v = get(*g, "max_rounds")) c.gbt.max_rounds = *v;
                if (const auto* v = get(*g, "learning_rate")) c.gbt.learning_rate = *v;
                if (const auto* v = get(*g, "max_leaves")) c.gbt.max_leaves = *v;
                if (const auto* v = get(*g, "min_samples_leaf")) c.gbt.min_samples_leaf = *v;
                if (const auto* v = get(*g, "n_bins")) c.gbt.n_bins = *v;
                if (const auto* v = get(*g, "l2_leaf_penalty")) c.gbt.l2_leaf_penalty = *v;
                if (const auto* v = get(*g, "early_stopping_rounds")) c.gbt.early_stopping_rounds = *v;
                if (const auto* v = get(*g, "max_target_lag")) {
                    c.gbt.target_lags.clear();
                    for (int lag = 1; lag <= v->get<int>(); ++lag) c.gbt.target_lags.push_back(lag);
                }
            }
        }
        if (const auto* run = get(j, "run")) {
            if (const auto* v = get(*run, "out_dir")) c.out_dir = *v;
            if (const auto* v = get(*run, "seed")) c.seed = *v;
            if (const auto* v = get(*run, "timestamp"))
                c.run_timestamp = parse_iso8601_utc(v->get<std::string>());
        }
        c.validate();
        return c;
    }

    static RunConfig load(const std::string& path) {
        const auto dot = path.rfind('.');
        const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
        if (ext == ".json") {
            std::ifstream in(path);
            if (!in) throw IoError("cannot open " + path);
            nlohmann::json j;
            in >> j;
            return from_json(j);
        }
        return from_json(load_toml(path)); // TOML is the default format
    }

    /// Canonical JSON echo of the semantic configuration (out_dir excluded so
    /// runs into different directories digest identically).
    nlohmann::json to_json() const {
        nlohmann::json reg = nlohmann::json::object();
        for (const auto& [target, list] : explicit_regressors) reg[target] = list;
        nlohmann::json j{
            {"data",
             {{"source", to_string(source)},
              {"cache_path", cache_path},
              {"fixture_dir", fixture_dir},
              {"latitude", latitude},
              {"longitude", longitude}}},
            {"synthetic", {{"rows", synthetic_rows}}},
            {"preprocess", {{"anomaly_threshold", anomaly_threshold}}},
            {"features",
             {{"targets", targets}, {"candidates", candidates}, {"top_k", top_k}, {"regressors", reg}}},
            {"models",
             {{"enabled", enabled_models},
              {"fbp",
               {{"n_changepoints", fbp_n_changepoints},
                {"changepoint_range", fbp_changepoint_range},
                {"weekly_order", weekly_order},
                {"yearly_order", yearly_order},
                {"daily_order", daily_order},
                {"trend_penalty", trend_penalty},
                {"regressor_penalty", regressor_penalty},
                {"fit_on_train_plus_val", fbp_fit_on_train_plus_val}}},
              {"np", {{"n_lags", np_n_lags}, {"regressor_lags", np_regressor_lags}}},
              {"sarimax", {{"seasonal_period", sarimax_period}}},
              {"gbt",
               {{"max_rounds", gbt.max_rounds},
                {"learning_rate", gbt.learning_rate},
                {"max_leaves", gbt.max_leaves},
                {"min_samples_leaf", gbt.min_samples_leaf},
                {"n_bins", gbt.n_bins},
                {"l2_leaf_penalty", gbt.l2_leaf_penalty},
                {"early_stopping_rounds", gbt.early_stopping_rounds},
                {"max_target_lag", gbt.max_lag()}}}}},
            {"run", {{"seed", seed}}}};
        if (start) j["data"]["start"] = format_iso8601_utc(*start);
        if (end) j["data"]["end"] = format_iso8601_utc(*end);
        if (run_timestamp) j["run"]["timestamp"] = format_iso8601_utc(*run_timestamp);
        return j;
    }

    std::string digest() const {
        const std::string canonical = to_json().dump();
        std::uint64_t hash = 0xcbf29ce484222325ull; // FNV-1a 64
        for (unsigned char c : canonical) {
            hash ^= c;
            hash *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
        return buf;
    }
};

} // namespace lightcast
