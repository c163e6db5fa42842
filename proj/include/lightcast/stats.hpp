#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lightcast/errors.hpp"
#include "lightcast/frame.hpp"

namespace lightcast {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw ValueError("mean of empty vector");
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Population variance (divide by n).
inline double population_variance(std::span<const double> x) {
    const double m = mean(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

inline double population_std(std::span<const double> x) { return std::sqrt(population_variance(x)); }

/// Sample variance (divide by n - 1).
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw ValueError("sample variance needs at least 2 values");
    const double m = mean(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double sample_std(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

/// Pearson correlation with population moments: Cov(X,Y) / (sigma_X sigma_Y).
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValueError("pearson: length mismatch");
    if (x.size() < 2) throw ValueError("pearson: need at least 2 samples");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0) throw DataError("pearson: first input is constant");
    if (syy == 0.0) throw DataError("pearson: second input is constant");
    return sxy / std::sqrt(sxx * syy);
}

/// Pairwise Pearson matrix over the named columns, row-major, diagonal = 1.
inline std::vector<double> correlation_matrix(const TimeSeriesFrame& frame,
                                              const std::vector<std::string>& columns) {
    const std::size_t k = columns.size();
    std::vector<std::vector<double>> data;
    data.reserve(k);
    for (const auto& name : columns) data.push_back(frame.column(name));
    std::vector<double> out(k * k, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double r = pearson(data[i], data[j]);
            out[i * k + j] = r;
            out[j * k + i] = r;
        }
    }
    return out;
}

} // namespace lightcast
