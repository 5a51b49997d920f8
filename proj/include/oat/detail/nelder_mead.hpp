// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oat::detail {

struct Minimum2 {
    std::array<double, 2> x;
    double value;
};

/// Downhill simplex in two variables. Deterministic; infinite values are
/// treated as worse than any finite one.
template <typename F>
Minimum2 nelder_mead_2d(F&& f, std::array<double, 2> start, std::array<double, 2> step,
                        int max_iterations = 500, double tolerance = 1e-13)
{
    using Point = std::array<double, 2>;
    std::array<Point, 3> p{start, Point{start[0] + step[0], start[1]},
                           Point{start[0], start[1] + step[1]}};
    std::array<double, 3> v{f(p[0]), f(p[1]), f(p[2])};

    auto order = [&] {
        std::array<int, 3> idx{0, 1, 2};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
        std::array<Point, 3> ps{p[idx[0]], p[idx[1]], p[idx[2]]};
        std::array<double, 3> vs{v[idx[0]], v[idx[1]], v[idx[2]]};
        p = ps;
        v = vs;
    };
    auto lerp = [](const Point& a, const Point& b, double t) {
        return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    };

    for (int it = 0; it < max_iterations; ++it) {
        order();
        if (std::isfinite(v[2]) &&
            std::abs(v[2] - v[0]) <= tolerance * (std::abs(v[0]) + tolerance)) {
            break;
        }
        const Point centroid{0.5 * (p[0][0] + p[1][0]), 0.5 * (p[0][1] + p[1][1])};
        const Point reflected = lerp(centroid, p[2], -1.0);
        const double fr = f(reflected);
        if (fr < v[0]) {
            const Point expanded = lerp(centroid, p[2], -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                p[2] = expanded;
                v[2] = fe;
            } else {
                p[2] = reflected;
                v[2] = fr;
            }
        } else if (fr < v[1]) {
            p[2] = reflected;
            v[2] = fr;
        } else {
            const bool outside = fr < v[2];
            const Point contracted = lerp(centroid, outside ? reflected : p[2], 0.5);
            const double fc = f(contracted);
            if (fc < (outside ? fr : v[2])) {
                p[2] = contracted;
                v[2] = fc;
            } else {
                for (int k = 1; k < 3; ++k) {
                    p[k] = lerp(p[0], p[k], 0.5);
                    v[k] = f(p[k]);
                }
            }
        }
    }
    order();
    return {p[0], v[0]};
}

} // namespace oat::detail
