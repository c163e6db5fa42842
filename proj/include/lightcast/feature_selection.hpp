#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lightcast/errors.hpp"
#include "lightcast/frame.hpp"

namespace lightcast {

/// Equal-width 2-D histogram used by the plug-in mutual information estimate.
struct JointHistogram {
    std::vector<double> bin_edges_x; // inner edges, size bins - 1
    std::vector<double> bin_edges_y;
    std::vector<std::size_t> counts; // bins_x * bins_y, row-major in x
    std::size_t bins_x = 0;
    std::size_t bins_y = 0;
    std::size_t n = 0;

    static JointHistogram build(std::span<const double> x, std::span<const double> y, std::size_t bins) {
        if (x.size() != y.size()) throw ValueError("joint histogram: length mismatch");
        if (x.empty()) throw ValueError("joint histogram: empty input");
        if (bins < 2) throw ValueError("joint histogram: need at least 2 bins");
        JointHistogram h;
        h.n = x.size();
        h.bins_x = bins;
        h.bins_y = bins;
        h.bin_edges_x = edges_for(x, bins);
        h.bin_edges_y = edges_for(y, bins);
        h.counts.assign(bins * bins, 0);
        for (std::size_t i = 0; i < x.size(); ++i)
            ++h.counts[bin_of(h.bin_edges_x, x[i]) * bins + bin_of(h.bin_edges_y, y[i])];
        return h;
    }

    /// Plug-in estimate sum p(x,y) ln[p(x,y) / (p(x) p(y))] in nats; empty cells contribute 0.
    double mutual_information() const {
        std::vector<double> px(bins_x, 0), py(bins_y, 0);
        const double dn = static_cast<double>(n);
        for (std::size_t i = 0; i < bins_x; ++i)
            for (std::size_t j = 0; j < bins_y; ++j) {
                const double p = static_cast<double>(counts[i * bins_y + j]) / dn;
                px[i] += p;
                py[j] += p;
            }
        double mi = 0;
        for (std::size_t i = 0; i < bins_x; ++i)
            for (std::size_t j = 0; j < bins_y; ++j) {
                const std::size_t c = counts[i * bins_y + j];
                if (c == 0) continue;
                const double p = static_cast<double>(c) / dn;
                mi += p * std::log(p / (px[i] * py[j]));
            }
        return mi;
    }

private:
    // Equal-width inner edges over [min, max]; the top value lands in the last bin.
    static std::vector<double> edges_for(std::span<const double> v, std::size_t bins) {
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const double lo = *lo_it, hi = *hi_it;
        std::vector<double> edges;
        edges.reserve(bins - 1);
        const double width = (hi - lo) / static_cast<double>(bins);
        for (std::size_t b = 1; b < bins; ++b) edges.push_back(lo + width * static_cast<double>(b));
        return edges;
    }

    static std::size_t bin_of(const std::vector<double>& edges, double v) {
        return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    }
};

inline double mutual_information(std::span<const double> x, std::span<const double> y, std::size_t bins) {
    return JointHistogram::build(x, y, bins).mutual_information();
}

/// Histogram entropy of one vector in nats (equals MI of the vector with itself).
inline double histogram_entropy(std::span<const double> x, std::size_t bins) {
    return mutual_information(x, x, bins);
}

/// Default bin count: ceil(sqrt(n)) capped at 64.
inline std::size_t default_bins(std::size_t n) {
    const auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::min<std::size_t>(std::max<std::size_t>(b, 2), 64);
}

/// Output of the greedy mRMR loop, including everything needed to audit it.
struct SelectionState {
    std::vector<std::string> full_set;
    std::vector<std::string> selected; // greedy order
    std::map<std::string, double> relevance; // I(f; y)
    std::map<std::pair<std::string, std::string>, double> redundancy_cache; // I(f; s)
    std::vector<double> step_scores;       // greedy objective at each pick
    std::vector<double> step_redundancy;   // (1/|S|) sum I(f;s) at each pick
    std::size_t bins = 0;

    nlohmann::json to_json() const {
        nlohmann::json steps = nlohmann::json::array();
        for (std::size_t i = 0; i < selected.size(); ++i)
            steps.push_back({{"feature", selected[i]},
                             {"relevance", relevance.at(selected[i])},
                             {"redundancy_penalty", step_redundancy[i]},
                             {"score", step_scores[i]}});
        nlohmann::json rel = nlohmann::json::object();
        for (const auto& [name, value] : relevance) rel[name] = value;
        return {{"bins", bins}, {"candidates", full_set}, {"selected", steps}, {"relevance", rel}};
    }
};

/// Greedy mRMR in the difference (MID) form: the first pick maximizes I(f;y),
/// each later pick maximizes I(f;y) - (1/|S|) sum_{s in S} I(f;s). Ties break
/// toward the earlier candidate. Statistics are computed on `rows` only, which
/// callers restrict to the train range.
inline SelectionState mrmr_select(const TimeSeriesFrame& frame, const std::string& target,
                                  const std::vector<std::string>& candidates, std::size_t k,
                                  IndexRange rows, std::size_t bins = 0) {
    if (candidates.empty()) throw ValueError("mrmr_select: empty candidate list");
    if (k == 0) throw ValueError("mrmr_select: k must be positive");
    if (k > candidates.size()) throw ValueError("mrmr_select: k exceeds candidate count");
    if (rows.empty() || rows.end > frame.rows()) throw ValueError("mrmr_select: bad row range");

    SelectionState state;
    state.full_set = candidates;
    state.bins = bins == 0 ? default_bins(rows.size()) : bins;

    const std::vector<double> y = frame.column_slice(target, rows);
    std::vector<std::vector<double>> data;
    data.reserve(candidates.size());
    for (const auto& name : candidates) data.push_back(frame.column_slice(name, rows));

    for (std::size_t i = 0; i < candidates.size(); ++i)
        state.relevance[candidates[i]] = mutual_information(data[i], y, state.bins);

    std::vector<bool> chosen(candidates.size(), false);
    auto pair_mi = [&](std::size_t a, std::size_t b) {
        auto key = std::make_pair(std::min(candidates[a], candidates[b]),
                                  std::max(candidates[a], candidates[b]));
        const auto it = state.redundancy_cache.find(key);
        if (it != state.redundancy_cache.end()) return it->second;
        const double mi = mutual_information(data[a], data[b], state.bins);
        state.redundancy_cache.emplace(key, mi);
        return mi;
    };

    std::vector<std::size_t> selected_idx;
    while (selected_idx.size() < k) {
        double best_score = -std::numeric_limits<double>::infinity();
        double best_red = 0;
        std::size_t best = candidates.size();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (chosen[i]) continue;
            double redundancy = 0;
            if (!selected_idx.empty()) {
                for (std::size_t s : selected_idx) redundancy += pair_mi(i, s);
                redundancy /= static_cast<double>(selected_idx.size());
            }
            const double score = state.relevance[candidates[i]] - redundancy;
            if (score > best_score) {
                best_score = score;
                best_red = redundancy;
                best = i;
            }
        }
        chosen[best] = true;
        selected_idx.push_back(best);
        state.selected.push_back(candidates[best]);
        state.step_scores.push_back(best_score);
        state.step_redundancy.push_back(best_red);
    }
    return state;
}

} // namespace lightcast
