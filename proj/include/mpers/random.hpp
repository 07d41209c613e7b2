#pragma once

// Random multi-metric spaces and query points for property tests and the
// verify command. Points live on a small integer lattice so the critical
// grids stay small; every distance is an exact rational.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "exactnum.hpp"
#include "filtration.hpp"

namespace mpers {

/// Metric k on lattice points: k = 0 is half the l1 distance, k = 1 the
/// l-infinity distance, k >= 2 the l1 distance divided by k + 1.
inline Rational lattice_metric(std::size_t k, const std::array<int, 2>& a, const std::array<int, 2>& b) {
    const int dx = std::abs(a[0] - b[0]), dy = std::abs(a[1] - b[1]);
    if (k == 1)
        return std::max(dx, dy);
    return Rational(dx + dy, k == 0 ? 2 : static_cast<std::int64_t>(k) + 1);
}

/// `points` random points of {0..side}^2 measured by `metrics` lattice metrics.
template <class Rng>
MultiMetricSpace random_space(Rng& rng, std::size_t points, std::size_t metrics, int side = 4) {
    std::uniform_int_distribution<int> coord(0, side);
    std::vector<std::array<int, 2>> xs(points);
    for (auto& x : xs)
        x = {coord(rng), coord(rng)};
    std::vector<std::vector<Rational>> ds(metrics, std::vector<Rational>(points * points));
    for (std::size_t k = 0; k < metrics; ++k)
        for (std::size_t i = 0; i < points; ++i)
            for (std::size_t j = 0; j < points; ++j)
                ds[k][i * points + j] = lattice_metric(k, xs[i], xs[j]);
    return MultiMetricSpace(points, std::move(ds));
}

/// Changes every off-diagonal distance by a random multiple of eps/steps in
/// [-eps, eps], clamped at zero, keeping symmetry.
template <class Rng>
MultiMetricSpace perturb(Rng& rng, const MultiMetricSpace& space, const Rational& eps, int steps = 2) {
    std::uniform_int_distribution<int> step(-steps, steps);
    const std::size_t n = space.point_count();
    std::vector<std::vector<Rational>> ds;
    for (std::size_t k = 0; k < space.metric_count(); ++k) {
        std::vector<Rational> d = space.metric(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const Rational moved = mpers::max(Rational(0), d[i * n + j] + eps * Rational(step(rng), steps));
                d[i * n + j] = moved;
                d[j * n + i] = moved;
            }
        ds.push_back(std::move(d));
    }
    return MultiMetricSpace(n, std::move(ds));
}

/// A point with each coordinate either a grid value or a random point between
/// (or slightly beyond) grid values.
template <class Rng>
Point random_point(Rng& rng, const Grid& grid, std::size_t n) {
    const auto& s = grid.values();
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    std::uniform_int_distribution<int> kind(0, 2);
    Point p(n);
    for (auto& x : p) {
        const Rational& base = s[pick(rng)];
        switch (kind(rng)) {
        case 0: x = base; break;
        case 1: x = base + Rational(1, 3); break;
        default: x = base - Rational(1, 4); break;
        }
    }
    return p;
}

/// Random nonnegative offset in {0, 1/2, 1, ..., 3}.
template <class Rng>
Rational random_offset(Rng& rng) {
    std::uniform_int_distribution<int> half_steps(0, 6);
    return Rational(half_steps(rng), 2);
}

/// A bar whose endpoints both lie on the gridlines |S^n| whenever the grid
/// allows it: u has a random coordinate snapped to a grid value and v = u +
/// random offsets with one coordinate snapped up to a grid value.
template <class Rng>
std::pair<Point, Point> random_bar_endpoints(Rng& rng, const Grid& grid, std::size_t n) {
    const auto& s = grid.values();
    std::uniform_int_distribution<std::size_t> coord(0, n - 1), pick(0, s.size() - 1);
    Point u = random_point(rng, grid, n);
    u[coord(rng)] = s[pick(rng)];
    Point v = u;
    for (auto& x : v)
        x += random_offset(rng);
    const std::size_t i = coord(rng);
    if (!grid.contains_value(v[i]))
        if (const auto up = grid.value_above(v[i]))
            v[i] = *up;
    return {std::move(u), std::move(v)};
}

} // namespace mpers
