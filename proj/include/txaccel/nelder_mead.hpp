#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace txaccel {

struct NelderMeadOptions {
    double initial_step = 0.25;  ///< offset of the extra simplex vertices along each axis
    std::size_t max_evaluations = 200;
    double tol_x = 1e-4;
    double tol_f = 1e-4;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Derivative-free downhill simplex minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// Stops after max_evaluations objective calls, or once both the spread of simplex
/// values is <= tol_f and every vertex lies within tol_x of the best one.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                    std::vector<double> start, const NelderMeadOptions& options = {}) {
    const std::size_t n = start.size();
    NelderMeadResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return objective(x);
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    values[0] = eval(start);
    for (std::size_t i = 0; i < n && result.evaluations < options.max_evaluations; ++i) {
        simplex[i + 1][i] += options.initial_step;
        values[i + 1] = eval(simplex[i + 1]);
    }
    if (result.evaluations < n + 1) {
        result.x = simplex[0];
        result.value = values[0];
        return result;
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s(n + 1);
        std::vector<double> v(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s[i] = simplex[order[i]];
            v[i] = values[order[i]];
        }
        simplex = std::move(s);
        values = std::move(v);
    };
    auto along = [&](const std::vector<double>& centroid, double t) {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
        return x;
    };

    sort_simplex();
    while (result.evaluations < options.max_evaluations) {
        double spread_x = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) spread_x = std::max(spread_x, std::abs(simplex[i][j] - simplex[0][j]));
        }
        if (values[n] - values[0] <= options.tol_f && spread_x <= options.tol_x) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        }

        const auto reflected = along(centroid, -1.0);
        const double f_reflected = eval(reflected);
        if (f_reflected < values[0]) {
            const auto expanded = along(centroid, -2.0);
            const double f_expanded = result.evaluations < options.max_evaluations ? eval(expanded) : f_reflected;
            if (f_expanded < f_reflected) {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
        } else if (f_reflected < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = f_reflected;
        } else {
            const bool outside = f_reflected < values[n];
            const auto contracted = along(centroid, outside ? -0.5 : 0.5);
            const double f_contracted = eval(contracted);
            if (f_contracted < (outside ? f_reflected : values[n])) {
                simplex[n] = contracted;
                values[n] = f_contracted;
            } else {
                for (std::size_t i = 1; i <= n && result.evaluations < options.max_evaluations; ++i) {
                    for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    values[i] = eval(simplex[i]);
                }
            }
        }
        sort_simplex();
    }
    result.x = simplex[0];
    result.value = values[0];
    return result;
}

}  // namespace txaccel
