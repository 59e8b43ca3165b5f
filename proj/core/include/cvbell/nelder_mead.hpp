#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace cvbell {

template <std::size_t N>
struct SimplexResult {
    std::array<double, N> x{};
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead minimization with the standard coefficients (1, 2, 1/2, 1/2).
/// Stops when the spread of function values across the simplex falls below
/// `f_tol`, or after `max_iterations`. Deterministic for a given start.
template <std::size_t N, class F>
SimplexResult<N> nelder_mead(F&& f, const std::array<double, N>& start, double step, double f_tol,
                             int max_iterations) {
    using Point = std::array<double, N>;
    std::array<Point, N + 1> simplex;
    std::array<double, N + 1> values;
    simplex[0] = start;
    for (std::size_t i = 0; i < N; ++i) {
        simplex[i + 1] = start;
        simplex[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= N; ++i) values[i] = f(simplex[i]);

    std::array<std::size_t, N + 1> order;
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        auto s = simplex;
        auto v = values;
        for (std::size_t i = 0; i <= N; ++i) {
            simplex[i] = s[order[i]];
            values[i] = v[order[i]];
        }
    };
    auto blend = [](const Point& a, const Point& b, double t) {
        Point p;
        for (std::size_t j = 0; j < N; ++j) p[j] = a[j] + t * (b[j] - a[j]);
        return p;
    };

    SimplexResult<N> result;
    int it = 0;
    for (; it < max_iterations; ++it) {
        sort_simplex();
        if (values[N] - values[0] <= f_tol) {
            result.converged = true;
            break;
        }
        Point centroid{};
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) centroid[j] += simplex[i][j] / N;

        const Point reflected = blend(centroid, simplex[N], -1.0);
        const double fr = f(reflected);
        if (fr < values[0]) {
            const Point expanded = blend(centroid, simplex[N], -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[N] = expanded;
                values[N] = fe;
            } else {
                simplex[N] = reflected;
                values[N] = fr;
            }
            continue;
        }
        if (fr < values[N - 1]) {
            simplex[N] = reflected;
            values[N] = fr;
            continue;
        }
        const bool outside = fr < values[N];
        const Point contracted = outside ? blend(centroid, reflected, 0.5)
                                         : blend(centroid, simplex[N], 0.5);
        const double fc = f(contracted);
        if (fc < std::min(fr, values[N])) {
            simplex[N] = contracted;
            values[N] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= N; ++i) {
            simplex[i] = blend(simplex[0], simplex[i], 0.5);
            values[i] = f(simplex[i]);
        }
    }
    sort_simplex();
    result.x = simplex[0];
    result.value = values[0];
    result.iterations = it;
    return result;
}

}  // namespace cvbell
