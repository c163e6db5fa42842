#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcast/frame.hpp"
#include "lightcast/stats.hpp"
#include "lightcast/timeutil.hpp"

namespace lightcast {

/// Histogram gradient-boosted regression trees with leaf-wise growth,
/// squared-error loss and validation-based early stopping.
struct GbtConfig {
    int max_rounds = 500;
    double learning_rate = 0.05;
    int max_leaves = 31;
    int min_samples_leaf = 20;
    int n_bins = 63;
    double l2_leaf_penalty = 1.0;
    int early_stopping_rounds = 50; // 0 disables early stopping

    // feature recipe: target lags + calendar + selected regressors
    std::vector<int> target_lags = default_lags();
    bool calendar_features = true;
    std::vector<std::string> regressors;

    static std::vector<int> default_lags() {
        std::vector<int> lags(24);
        std::iota(lags.begin(), lags.end(), 1);
        return lags;
    }

    void validate() const {
        if (max_rounds < 1) throw ValueError("gbt: max_rounds must be >= 1");
        if (learning_rate <= 0 || learning_rate > 1) throw ValueError("gbt: learning_rate must be in (0, 1]");
        if (max_leaves < 2) throw ValueError("gbt: max_leaves must be >= 2");
        if (min_samples_leaf < 1) throw ValueError("gbt: min_samples_leaf must be >= 1");
        if (n_bins < 2) throw ValueError("gbt: n_bins must be >= 2");
        if (l2_leaf_penalty < 0) throw ValueError("gbt: l2_leaf_penalty must be >= 0");
        if (early_stopping_rounds < 0) throw ValueError("gbt: early_stopping_rounds must be >= 0");
        if (target_lags.empty()) throw ValueError("gbt: need at least one target lag");
        for (int lag : target_lags)
            if (lag < 1) throw ValueError("gbt: lags must be >= 1");
    }

    int max_lag() const { return *std::max_element(target_lags.begin(), target_lags.end()); }
};

/// Flat feature matrix with aligned targets and provenance back to frame rows.
struct TabularDataset {
    std::vector<std::string> feature_names;
    std::vector<double> features; // row-major n_rows x n_features
    std::vector<double> targets;
    std::vector<std::int64_t> timestamps;
    std::vector<std::size_t> frame_rows;
    std::size_t n_rows = 0;
    std::size_t n_features = 0;

    double feature(std::size_t row, std::size_t col) const { return features[row * n_features + col]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(features.data() + r * n_features, n_features);
    }

    /// Rows whose originating frame row lies in `range`.
    TabularDataset filter_by_frame_rows(IndexRange range) const {
        TabularDataset out;
        out.feature_names = feature_names;
        out.n_features = n_features;
        for (std::size_t r = 0; r < n_rows; ++r) {
            if (!range.contains(frame_rows[r])) continue;
            const auto rr = row(r);
            out.features.insert(out.features.end(), rr.begin(), rr.end());
            out.targets.push_back(targets[r]);
            out.timestamps.push_back(timestamps[r]);
            out.frame_rows.push_back(frame_rows[r]);
            ++out.n_rows;
        }
        return out;
    }
};

/// Builds [lag features | hour-of-day, day-of-week | regressors] for every
/// frame row whose lags are all available; earlier rows are dropped.
inline TabularDataset build_tabular_features(const TimeSeriesFrame& frame, const std::string& target,
                                             const GbtConfig& recipe) {
    recipe.validate();
    frame.require_hourly();
    const std::size_t max_lag = static_cast<std::size_t>(recipe.max_lag());
    if (frame.rows() <= max_lag) throw ValueError("build_tabular_features: fewer rows than max lag");

    TabularDataset ds;
    for (int lag : recipe.target_lags) ds.feature_names.push_back("lag_" + std::to_string(lag));
    if (recipe.calendar_features) {
        ds.feature_names.push_back("hour_of_day");
        ds.feature_names.push_back("day_of_week");
    }
    for (const auto& r : recipe.regressors) ds.feature_names.push_back(r);
    ds.n_features = ds.feature_names.size();

    const std::size_t tc = frame.column_index(target);
    std::vector<std::size_t> reg_cols;
    for (const auto& r : recipe.regressors) reg_cols.push_back(frame.column_index(r));

    ds.n_rows = frame.rows() - max_lag;
    ds.features.reserve(ds.n_rows * ds.n_features);
    ds.targets.reserve(ds.n_rows);
    for (std::size_t row = max_lag; row < frame.rows(); ++row) {
        for (int lag : recipe.target_lags)
            ds.features.push_back(frame.at(row - static_cast<std::size_t>(lag), tc));
        if (recipe.calendar_features) {
            ds.features.push_back(static_cast<double>(hour_of_day(frame.timestamps()[row])));
            ds.features.push_back(static_cast<double>(day_of_week(frame.timestamps()[row])));
        }
        for (std::size_t rc : reg_cols) ds.features.push_back(frame.at(row, rc));
        ds.targets.push_back(frame.at(row, tc));
        ds.timestamps.push_back(frame.timestamps()[row]);
        ds.frame_rows.push_back(row);
    }
    return ds;
}

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> row) const {
        int idx = 0;
        while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
            const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
            idx = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(idx)].value;
    }

    std::size_t n_splits() const {
        std::size_t count = 0;
        for (const auto& n : nodes) count += !n.is_leaf();
        return count;
    }
};

/// Boosted forest: prediction = base_score + learning_rate * sum of the leaf
/// value each tree routes the row to.
struct GbtEnsemble {
    double base_score = 0;
    double learning_rate = 0;
    std::vector<Tree> trees;
    std::vector<std::vector<double>> bin_edges; // per feature, finite inner edges
    std::vector<std::string> feature_names;
    // recipe echo for recursive forecasting
    std::vector<int> target_lags;
    bool calendar_features = true;
    std::vector<std::string> regressors;
    // fit diagnostics
    int best_round = 0;
    std::vector<double> train_rmse_history;
    std::vector<double> val_rmse_history;

    double predict_row(std::span<const double> row) const {
        double yhat = base_score;
        for (const auto& t : trees) yhat += learning_rate * t.predict(row);
        return yhat;
    }

    nlohmann::json to_json() const {
        nlohmann::json forest = nlohmann::json::array();
        for (const auto& tree : trees) {
            nlohmann::json nodes = nlohmann::json::array();
            for (const auto& n : tree.nodes)
                nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold},
                                 {"left", n.left}, {"right", n.right}, {"value", n.value}});
            forest.push_back(std::move(nodes));
        }
        return {{"schema", "lightcast.gbt.v1"},
                {"base_score", base_score},
                {"learning_rate", learning_rate},
                {"bin_edges", bin_edges},
                {"feature_names", feature_names},
                {"recipe", {{"target_lags", target_lags},
                            {"calendar_features", calendar_features},
                            {"regressors", regressors}}},
                {"best_round", best_round},
                {"trees", forest}};
    }

    static GbtEnsemble from_json(const nlohmann::json& j) {
        GbtEnsemble e;
        e.base_score = j.at("base_score");
        e.learning_rate = j.at("learning_rate");
        e.bin_edges = j.at("bin_edges").get<std::vector<std::vector<double>>>();
        e.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const auto& recipe = j.at("recipe");
        e.target_lags = recipe.at("target_lags").get<std::vector<int>>();
        e.calendar_features = recipe.at("calendar_features");
        e.regressors = recipe.at("regressors").get<std::vector<std::string>>();
        e.best_round = j.at("best_round");
        for (const auto& nodes : j.at("trees")) {
            Tree t;
            for (const auto& n : nodes)
                t.nodes.push_back({n.at("feature"), n.at("threshold"), n.at("left"), n.at("right"),
                                   n.at("value")});
            e.trees.push_back(std::move(t));
        }
        return e;
    }
};

namespace detail {

/// Inner bin edges per feature. Up to n_bins distinct values get one bin per
/// value (edges at midpoints); otherwise edges cut the sorted sample into
/// roughly equal-frequency bins without splitting ties.
inline std::vector<double> bin_edges_for(std::span<const double> values, int n_bins) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> unique;
    std::vector<std::size_t> counts;
    for (double v : sorted) {
        if (unique.empty() || v != unique.back()) {
            unique.push_back(v);
            counts.push_back(1);
        } else {
            ++counts.back();
        }
    }
    std::vector<double> edges;
    if (unique.size() <= static_cast<std::size_t>(n_bins)) {
        for (std::size_t i = 0; i + 1 < unique.size(); ++i)
            edges.push_back(unique[i] + 0.5 * (unique[i + 1] - unique[i]));
        return edges;
    }
    const double per_bin = static_cast<double>(sorted.size()) / static_cast<double>(n_bins);
    double filled = 0;
    double next_cut = per_bin;
    for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
        filled += static_cast<double>(counts[i]);
        if (filled >= next_cut) {
            edges.push_back(unique[i] + 0.5 * (unique[i + 1] - unique[i]));
            while (next_cut <= filled) next_cut += per_bin;
        }
    }
    return edges;
}

inline std::uint16_t bin_of(const std::vector<double>& edges, double v) {
    return static_cast<std::uint16_t>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
}

struct LeafCandidate {
    int node = 0;
    std::size_t start = 0, end = 0; // segment of the row index partition
    double grad_sum = 0;
    double count = 0;
    // best split found for this leaf
    double gain = 0;
    int feature = -1;
    int bin = -1;
};

} // namespace detail

/// Squared-error boosting with leaf-wise tree growth over feature histograms.
/// Splits maximize G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G_P^2/(H_P+lambda)
/// with H the sample counts; leaf values are -G/(H+lambda). With a validation
/// set and early_stopping_rounds > 0 the returned ensemble is truncated at the
/// round with minimum validation RMSE.
inline GbtEnsemble fit_gbt(const GbtConfig& config, const TabularDataset& train,
                           const TabularDataset& val) {
    config.validate();
    if (train.n_rows == 0) throw ValueError("fit_gbt: empty train set");
    const bool early_stopping = config.early_stopping_rounds > 0;
    if (early_stopping && val.n_rows == 0)
        throw ValueError("fit_gbt: early stopping needs a nonempty validation set");

    const std::size_t n = train.n_rows;
    const std::size_t n_features = train.n_features;

    GbtEnsemble ensemble;
    ensemble.learning_rate = config.learning_rate;
    ensemble.feature_names = train.feature_names;
    ensemble.target_lags = config.target_lags;
    ensemble.calendar_features = config.calendar_features;
    ensemble.regressors = config.regressors;
    ensemble.base_score = mean(train.targets);

    // bin the training features once
    ensemble.bin_edges.resize(n_features);
    std::vector<std::uint16_t> bins(n * n_features);
    std::vector<double> col(n);
    for (std::size_t f = 0; f < n_features; ++f) {
        for (std::size_t r = 0; r < n; ++r) col[r] = train.feature(r, f);
        ensemble.bin_edges[f] = detail::bin_edges_for(col, config.n_bins);
        for (std::size_t r = 0; r < n; ++r)
            bins[r * n_features + f] = detail::bin_of(ensemble.bin_edges[f], col[r]);
    }

    std::vector<double> pred(n, ensemble.base_score);
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - train.targets[i];
    std::vector<double> val_pred(val.n_rows, ensemble.base_score);

    std::vector<std::uint32_t> row_index(n);
    const double lambda = config.l2_leaf_penalty;
    const double min_leaf = static_cast<double>(config.min_samples_leaf);

    auto rmse_of = [](std::span<const double> yhat, std::span<const double> y) {
        double ss = 0;
        for (std::size_t i = 0; i < yhat.size(); ++i) {
            const double d = yhat[i] - y[i];
            ss += d * d;
        }
        return std::sqrt(ss / static_cast<double>(yhat.size()));
    };

    // best histogram split for one leaf segment; ties keep the first feature/lowest bin
    auto find_best_split = [&](detail::LeafCandidate& leaf) {
        leaf.gain = 0;
        leaf.feature = -1;
        leaf.bin = -1;
        const double parent_term = leaf.grad_sum * leaf.grad_sum / (leaf.count + lambda);
        std::vector<double> hist_g;
        std::vector<double> hist_h;
        for (std::size_t f = 0; f < n_features; ++f) {
            const std::size_t n_edges = ensemble.bin_edges[f].size();
            if (n_edges == 0) continue; // single-valued feature
            hist_g.assign(n_edges + 1, 0.0);
            hist_h.assign(n_edges + 1, 0.0);
            for (std::size_t i = leaf.start; i < leaf.end; ++i) {
                const std::uint32_t row = row_index[i];
                const std::uint16_t b = bins[row * n_features + f];
                hist_g[b] += grad[row];
                hist_h[b] += 1.0;
            }
            double gl = 0, hl = 0;
            for (std::size_t b = 0; b < n_edges; ++b) { // split: bin <= b goes left
                gl += hist_g[b];
                hl += hist_h[b];
                const double hr = leaf.count - hl;
                if (hl < min_leaf || hr < min_leaf) continue;
                const double gr = leaf.grad_sum - gl;
                const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_term;
                if (gain > leaf.gain) {
                    leaf.gain = gain;
                    leaf.feature = static_cast<int>(f);
                    leaf.bin = static_cast<int>(b);
                }
            }
        }
    };

    int best_round = 0;
    double best_val_rmse = std::numeric_limits<double>::infinity();

    for (int round = 1; round <= config.max_rounds; ++round) {
        std::iota(row_index.begin(), row_index.end(), 0u);

        Tree tree;
        tree.nodes.push_back({});
        std::vector<detail::LeafCandidate> open;
        detail::LeafCandidate root{0, 0, n, 0, static_cast<double>(n), 0, -1, -1};
        for (double g : grad) root.grad_sum += g;
        find_best_split(root);
        open.push_back(root);

        std::size_t n_leaves = 1;
        while (n_leaves < static_cast<std::size_t>(config.max_leaves)) {
            std::size_t best = open.size();
            for (std::size_t i = 0; i < open.size(); ++i)
                if (open[i].feature >= 0 && (best == open.size() || open[i].gain > open[best].gain))
                    best = i;
            if (best == open.size()) break; // no leaf has a positive-gain split

            const detail::LeafCandidate leaf = open[best];
            const std::size_t f = static_cast<std::size_t>(leaf.feature);
            const std::uint16_t split_bin = static_cast<std::uint16_t>(leaf.bin);
            const auto mid_it = std::stable_partition(
                row_index.begin() + static_cast<std::ptrdiff_t>(leaf.start),
                row_index.begin() + static_cast<std::ptrdiff_t>(leaf.end),
                [&](std::uint32_t row) { return bins[row * n_features + f] <= split_bin; });
            const std::size_t mid = static_cast<std::size_t>(mid_it - row_index.begin());

            TreeNode& parent = tree.nodes[static_cast<std::size_t>(leaf.node)];
            parent.feature = leaf.feature;
            parent.threshold = ensemble.bin_edges[f][static_cast<std::size_t>(leaf.bin)];
            parent.left = static_cast<int>(tree.nodes.size());
            parent.right = parent.left + 1;
            tree.nodes.push_back({});
            tree.nodes.push_back({});

            detail::LeafCandidate left{parent.left, leaf.start, mid, 0, 0, 0, -1, -1};
            for (std::size_t i = left.start; i < left.end; ++i) left.grad_sum += grad[row_index[i]];
            left.count = static_cast<double>(left.end - left.start);
            detail::LeafCandidate right{parent.right, mid, leaf.end, leaf.grad_sum - left.grad_sum,
                                        leaf.count - left.count, 0, -1, -1};
            find_best_split(left);
            find_best_split(right);
            open[best] = left;
            open.push_back(right);
            ++n_leaves;
        }

        if (tree.n_splits() == 0) break; // gradients carry no usable signal

        for (const auto& leaf : open) {
            tree.nodes[static_cast<std::size_t>(leaf.node)].value = -leaf.grad_sum / (leaf.count + lambda);
            const double step = config.learning_rate *
                                tree.nodes[static_cast<std::size_t>(leaf.node)].value;
            for (std::size_t i = leaf.start; i < leaf.end; ++i) {
                const std::uint32_t row = row_index[i];
                pred[row] += step;
                grad[row] = pred[row] - train.targets[row];
            }
        }
        ensemble.trees.push_back(std::move(tree));
        ensemble.train_rmse_history.push_back(rmse_of(pred, train.targets));

        if (val.n_rows > 0) {
            const Tree& added = ensemble.trees.back();
            for (std::size_t r = 0; r < val.n_rows; ++r)
                val_pred[r] += config.learning_rate * added.predict(val.row(r));
            const double vr = rmse_of(val_pred, val.targets);
            ensemble.val_rmse_history.push_back(vr);
            if (vr < best_val_rmse) {
                best_val_rmse = vr;
                best_round = static_cast<int>(ensemble.trees.size());
            }
            if (early_stopping &&
                static_cast<int>(ensemble.trees.size()) - best_round >= config.early_stopping_rounds)
                break;
        }
    }

    if (early_stopping) {
        ensemble.trees.resize(static_cast<std::size_t>(best_round));
        ensemble.best_round = best_round;
    } else {
        ensemble.best_round = static_cast<int>(ensemble.trees.size());
    }
    return ensemble;
}

inline std::vector<double> predict_gbt(const GbtEnsemble& ensemble, const TabularDataset& data) {
    if (data.n_features != ensemble.feature_names.size())
        throw ValueError("predict_gbt: feature count mismatch");
    if (data.feature_names != ensemble.feature_names)
        throw ValueError("predict_gbt: feature columns do not match the training recipe");
    std::vector<double> out;
    out.reserve(data.n_rows);
    for (std::size_t r = 0; r < data.n_rows; ++r) out.push_back(ensemble.predict_row(data.row(r)));
    return out;
}

/// Recursive multi-step forecast over the future rows: predicted values refill
/// the target-lag features step by step. `history_tail` holds the last
/// max-lag observed target values, oldest first; `future` supplies timestamps
/// and scaled regressor values.
inline std::vector<double> forecast_gbt(const GbtEnsemble& ensemble, std::span<const double> history_tail,
                                        const TimeSeriesFrame& future) {
    const std::size_t max_lag = static_cast<std::size_t>(
        *std::max_element(ensemble.target_lags.begin(), ensemble.target_lags.end()));
    if (history_tail.size() < max_lag) throw ValueError("forecast_gbt: history tail shorter than max lag");

    std::vector<std::size_t> reg_cols;
    for (const auto& r : ensemble.regressors) reg_cols.push_back(future.column_index(r));

    std::deque<double> window(history_tail.end() - static_cast<std::ptrdiff_t>(max_lag),
                              history_tail.end()); // oldest first
    std::vector<double> row(ensemble.feature_names.size());
    std::vector<double> forecast;
    forecast.reserve(future.rows());
    for (std::size_t h = 0; h < future.rows(); ++h) {
        std::size_t c = 0;
        for (int lag : ensemble.target_lags) row[c++] = window[max_lag - static_cast<std::size_t>(lag)];
        if (ensemble.calendar_features) {
            row[c++] = static_cast<double>(hour_of_day(future.timestamps()[h]));
            row[c++] = static_cast<double>(day_of_week(future.timestamps()[h]));
        }
        for (std::size_t rc : reg_cols) row[c++] = future.at(h, rc);
        const double yhat = ensemble.predict_row(row);
        forecast.push_back(yhat);
        window.pop_front();
        window.push_back(yhat);
    }
    return forecast;
}

} // namespace lightcast
