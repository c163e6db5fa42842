#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "lightcast/errors.hpp"

namespace lightcast {

struct NelderMeadOptions {
    int max_iterations = 2000;
    double relative_tolerance = 1e-10; // stop when the simplex objective spread falls below this
    double initial_step = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0;
    int iterations = 0;
    bool converged = false;
};

/// Deterministic Nelder-Mead simplex minimizer with the standard
/// reflection/expansion/contraction/shrink coefficients (1, 2, 0.5, 0.5).
/// The start point is always a vertex, so the result never exceeds f(x0).
inline NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                             std::span<const double> x0,
                                             const NelderMeadOptions& options = {}) {
    const std::size_t n = x0.size();
    if (n == 0) throw ValueError("nelder_mead: empty start point");

    std::vector<std::vector<double>> vertices(n + 1, std::vector<double>(x0.begin(), x0.end()));
    for (std::size_t i = 0; i < n; ++i) vertices[i + 1][i] += options.initial_step;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f(vertices[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), candidate(n);

    NelderMeadResult result;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second_worst = order[n - 1];

        const double spread = values[worst] - values[best];
        if (spread <= options.relative_tolerance * (std::abs(values[best]) + options.relative_tolerance)) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += vertices[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double scale) {
            for (std::size_t d = 0; d < n; ++d)
                candidate[d] = centroid[d] + scale * (vertices[worst][d] - centroid[d]);
        };

        blend(-1.0); // reflection
        const double f_reflect = f(candidate);
        if (f_reflect < values[best]) {
            std::vector<double> reflected = candidate;
            blend(-2.0); // expansion
            const double f_expand = f(candidate);
            if (f_expand < f_reflect) {
                vertices[worst] = candidate;
                values[worst] = f_expand;
            } else {
                vertices[worst] = std::move(reflected);
                values[worst] = f_reflect;
            }
        } else if (f_reflect < values[second_worst]) {
            vertices[worst] = candidate;
            values[worst] = f_reflect;
        } else {
            if (f_reflect < values[worst]) {
                blend(-0.5); // outside contraction
            } else {
                blend(0.5); // inside contraction
            }
            const double f_contract = f(candidate);
            if (f_contract < std::min(f_reflect, values[worst])) {
                vertices[worst] = candidate;
                values[worst] = f_contract;
            } else {
                // shrink all vertices toward the best
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        vertices[i][d] = vertices[best][d] + 0.5 * (vertices[i][d] - vertices[best][d]);
                    values[i] = f(vertices[i]);
                }
            }
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x = vertices[best];
    result.value = values[best];
    result.iterations = iter;
    return result;
}

} // namespace lightcast
