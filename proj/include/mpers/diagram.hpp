#pragma once

// Bars, the finite bar poset of a grid and its covers, the birth-death rank function,
// its Moebius inversion (the persistence diagram), the closed form, the box
// formula, and support enumeration along diagonal lines.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exactnum.hpp"
#include "filtration.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

namespace mpers {

/// A bar (u, v) with u <= v.
struct Bar {
    Point u;
    Point v;

    std::size_t n_params() const noexcept { return u.size(); }

    friend auto operator<=>(const Bar&, const Bar&) = default;
    friend bool operator==(const Bar&, const Bar&) = default;
};

inline Bar make_bar(Point u, Point v) {
    if (!leq(u, v))
        throw PreconditionError("bar endpoints must satisfy u <= v, got " + to_string(u) + " and " + to_string(v));
    return {std::move(u), std::move(v)};
}

inline std::string to_string(const Bar& b) { return "[" + to_string(b.u) + ", " + to_string(b.v) + "]"; }

/// q - p when it is a constant vector t * (1, ..., 1).
inline std::optional<Rational> constant_difference(const Point& p, const Point& q) {
    if (p.size() != q.size())
        throw DimensionMismatch("points of different dimension");
    if (p.empty())
        return Rational(0);
    const Rational t = q[0] - p[0];
    for (std::size_t i = 1; i < p.size(); ++i)
        if (q[i] - p[i] != t)
            return std::nullopt;
    return t;
}

/// a <= b in Dgm(R^n): both endpoints move up along the diagonal.
inline bool bar_leq(const Bar& a, const Bar& b) {
    const auto du = constant_difference(a.u, b.u);
    const auto dv = constant_difference(a.v, b.v);
    return du && dv && du->sign() >= 0 && dv->sign() >= 0;
}

/// Half the smallest side of the box spanned by the bar; zero on the diagonal.
inline Rational radius(const Bar& b) {
    Rational r = b.v[0] - b.u[0];
    for (std::size_t i = 1; i < b.u.size(); ++i)
        r = mpers::min(r, b.v[i] - b.u[i]);
    return r / 2;
}

/// Largest q = p - t(1,...,1), t > 0, on the gridlines |S^n| (and >= floor
/// when given).
inline std::optional<Point> prev_on_gridlines(const Point& p, const Grid& grid,
                                              const std::optional<Point>& floor = std::nullopt) {
    std::optional<Rational> t;
    for (const auto& x : p)
        if (const auto below = grid.value_below(x)) {
            const Rational gap = x - *below;
            if (!t || gap < *t)
                t = gap;
        }
    if (!t)
        return std::nullopt;
    Point q = shifted(p, -*t);
    if (floor && !leq(*floor, q))
        return std::nullopt;
    return q;
}

/// Smallest q = p + t(1,...,1), t > 0, on the gridlines.
inline std::optional<Point> next_on_gridlines(const Point& p, const Grid& grid) {
    std::optional<Rational> t;
    for (const auto& x : p)
        if (const auto above = grid.value_above(x)) {
            const Rational gap = *above - x;
            if (!t || gap < *t)
                t = gap;
        }
    if (!t)
        return std::nullopt;
    return shifted(p, *t);
}

/// Sorted offsets t in [lo, hi] with p + t(1,...,1) on the gridlines.
inline std::vector<Rational> gridline_hits(const Point& p, const Grid& grid,
                                           const std::optional<Rational>& lo = std::nullopt,
                                           const std::optional<Rational>& hi = std::nullopt) {
    std::vector<Rational> ts;
    for (const auto& x : p)
        for (const auto& s : grid.values()) {
            Rational t = s - x;
            if ((lo && t < *lo) || (hi && *hi < t))
                continue;
            ts.push_back(std::move(t));
        }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

/// Offsets s in [lo, hi] of the upper diagonal of the line pair through k at
/// which a bar can carry mass: gridline hits of k.v, plus the points where a
/// gridline hit of k.u reaches radius zero. The second kind are off the
/// gridlines in general but the rank function changes there, because the
/// constraint u <= v cuts through a grid cell.
inline std::vector<Rational> upper_offsets(const Bar& k, const Grid& grid,
                                           const std::optional<Rational>& lo = std::nullopt,
                                           const std::optional<Rational>& hi = std::nullopt) {
    const Rational gap = radius(k) * 2;
    auto ts = gridline_hits(k.v, grid, lo, hi);
    const auto shift = [&](const std::optional<Rational>& x) -> std::optional<Rational> {
        if (x)
            return *x + gap;
        return std::nullopt;
    };
    for (const auto& t : gridline_hits(k.u, grid, shift(lo), shift(hi)))
        ts.push_back(t - gap);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

/// Vertices of the bar poset: u on the gridlines, and v on the gridlines or
/// at radius zero from u.
inline bool in_dgm(const Bar& k, const Grid& grid) {
    return grid.on_gridlines(k.u) && (grid.on_gridlines(k.v) || radius(k).sign() == 0);
}

/// The bars covered by k in the bar poset: j1 = (prev u, v), j2 = (u, prev v)
/// when u <= prev v, and their meet j3 when both exist.
struct Covers {
    std::optional<Bar> j1;
    std::optional<Bar> j2;
    std::optional<Bar> j3;

    std::vector<Bar> covered() const {
        std::vector<Bar> out;
        if (j1)
            out.push_back(*j1);
        if (j2)
            out.push_back(*j2);
        return out;
    }
};

inline Covers covers_below(const Bar& k, const Grid& grid) {
    Covers c;
    const auto pu = prev_on_gridlines(k.u, grid);
    std::optional<Point> pv;
    if (radius(k).sign() > 0) {
        const auto below = upper_offsets(k, grid, std::nullopt, Rational(0));
        // the last offset is 0 itself when k.v is a vertex
        for (auto it = below.rbegin(); it != below.rend(); ++it)
            if (it->sign() < 0) {
                Point q = shifted(k.v, *it);
                if (leq(k.u, q))
                    pv = std::move(q);
                break;
            }
    }
    if (pu)
        c.j1 = Bar{*pu, k.v};
    if (pv)
        c.j2 = Bar{k.u, *pv};
    if (pu && pv)
        c.j3 = Bar{*pu, *pv};
    return c;
}

/// All J <= K in the bar poset.
inline std::vector<Bar> bars_below(const Bar& k, const Grid& grid) {
    std::vector<Bar> out;
    const auto tu = gridline_hits(k.u, grid, std::nullopt, Rational(0));
    const auto tv = upper_offsets(k, grid, std::nullopt, Rational(0));
    for (const auto& a : tu) {
        Point u = shifted(k.u, a);
        for (const auto& b : tv) {
            Point v = shifted(k.v, b);
            if (leq(u, v))
                out.push_back({u, std::move(v)});
        }
    }
    return out;
}

/// Birth-death spaces and ranks of one graded complex, memoised by grid cell
/// (chain, cycle and boundary spaces are constant on cells of the critical
/// grid). Safe for concurrent use.
template <CoefficientField F>
class RankFunction {
public:
    using Cell = std::vector<int>;

    explicit RankFunction(const GradedComplex<F>& complex) : complex_(&complex), cells_(critical_grid(complex)) {}

    const GradedComplex<F>& complex() const noexcept { return *complex_; }
    const Grid& cell_grid() const noexcept { return cells_; }
    Cell cell(const Point& p) const {
        if (p.size() != complex_->n_params())
            throw DimensionMismatch("point " + to_string(p) + " has the wrong number of coordinates");
        return cells_.cell(p);
    }

    const Subspace<F>& cycles(int d, const Cell& c) const {
        return cached(z_, key(d, c), [&] { return mpers::cycles(*complex_, d, representative(c)); });
    }

    const Subspace<F>& boundaries(int d, const Cell& c) const {
        return cached(b_, key(d, c), [&] { return mpers::boundaries(*complex_, d, representative(c)); });
    }

    /// BD_d(u, v) = Z_d(u) meet B_d(v).
    const Subspace<F>& birth_death(int d, const Cell& cu, const Cell& cv) const {
        return cached(bd_, key(d, cu, cv), [&] { return meet(cycles(d, cu), boundaries(d, cv)); });
    }

    /// dim Z(u) + dim B(v) - rank [Z(u) | B(v)]
    std::size_t rank(int d, const Cell& cu, const Cell& cv) const {
        if (d < 0)
            throw PreconditionError("rank is defined for d >= 0");
        const auto k = key(d, cu, cv);
        {
            std::shared_lock lock(mutex_);
            if (const auto it = rank_.find(k); it != rank_.end())
                return it->second;
        }
        const auto& z = cycles(d, cu);
        const auto& b = boundaries(d, cv);
        const std::size_t value = z.dim() + b.dim() - concat_rank(z, b);
        std::unique_lock lock(mutex_);
        rank_.emplace(k, value);
        return value;
    }

    std::size_t rank(int d, const Bar& bar) const { return rank(d, cell(bar.u), cell(bar.v)); }
    const Subspace<F>& birth_death(int d, const Bar& bar) const { return birth_death(d, cell(bar.u), cell(bar.v)); }

private:
    static std::vector<int> key(int d, const Cell& a) {
        std::vector<int> k;
        k.reserve(a.size() + 1);
        k.push_back(d);
        k.insert(k.end(), a.begin(), a.end());
        return k;
    }

    static std::vector<int> key(int d, const Cell& a, const Cell& b) {
        std::vector<int> k = key(d, a);
        k.insert(k.end(), b.begin(), b.end());
        return k;
    }

    Point representative(const Cell& c) const {
        Point p(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            p[i] = c[i] < 0 ? cells_.min() - 1 : cells_.values()[static_cast<std::size_t>(c[i])];
        return p;
    }

    template <class Make>
    const Subspace<F>& cached(std::map<std::vector<int>, std::unique_ptr<Subspace<F>>>& table,
                              const std::vector<int>& k, Make&& make) const {
        {
            std::shared_lock lock(mutex_);
            if (const auto it = table.find(k); it != table.end())
                return *it->second;
        }
        auto value = std::make_unique<Subspace<F>>(make());
        std::unique_lock lock(mutex_);
        return *table.try_emplace(k, std::move(value)).first->second;
    }

    const GradedComplex<F>* complex_;
    Grid cells_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::vector<int>, std::unique_ptr<Subspace<F>>> z_, b_, bd_;
    mutable std::map<std::vector<int>, std::size_t> rank_;
};

template <CoefficientField F>
std::size_t rank(const RankFunction<F>& rf, int d, const Bar& bar) {
    if (!leq(bar.u, bar.v))
        throw PreconditionError("rank needs a bar with u <= v");
    return rf.rank(d, bar);
}

template <CoefficientField F>
std::size_t rank(const GradedComplex<F>& complex, int d, const Bar& bar) {
    return rank(RankFunction<F>(complex), d, bar);
}

/// rank(K) - rank(J1) - rank(J2) + rank(J3) over the covers of K in the bar
/// poset; zero off it.
template <CoefficientField F>
std::int64_t mobius_inversion_at(const RankFunction<F>& rf, int d, const Bar& k, const Grid& grid) {
    if (!in_dgm(k, grid))
        return 0;
    const Covers c = covers_below(k, grid);
    const auto r = [&](const Bar& b) { return static_cast<std::int64_t>(rf.rank(d, b)); };
    std::int64_t value = r(k);
    if (c.j1)
        value -= r(*c.j1);
    if (c.j2)
        value -= r(*c.j2);
    if (c.j3)
        value += r(*c.j3);
    return value;
}

template <CoefficientField F>
std::int64_t mobius_inversion_at(const GradedComplex<F>& complex, int d, const Bar& k, const Grid& grid) {
    return mobius_inversion_at(RankFunction<F>(complex), d, k, grid);
}

/// dim BD(K) / (join of BD(J) over the covers J of K).
template <CoefficientField F>
std::size_t closed_form_at(const RankFunction<F>& rf, int d, const Bar& k, const Grid& grid) {
    if (!in_dgm(k, grid))
        return 0;
    const Covers c = covers_below(k, grid);
    const Subspace<F>& top = rf.birth_death(d, k);
    Subspace<F> below = Subspace<F>::zero(top.field(), top.ambient_dim());
    for (const Bar& j : c.covered())
        below = join(below, rf.birth_death(d, j));
    return quotient_dim(top, below);
}

template <CoefficientField F>
std::size_t closed_form_at(const GradedComplex<F>& complex, int d, const Bar& k, const Grid& grid) {
    return closed_form_at(RankFunction<F>(complex), d, k, grid);
}

/// Half the distance from each corner offset +-r to the nearest vertex
/// offset beyond it on the same diagonal, capped by (radius - r) / 2.
inline Rational default_box_delta(const Bar& i, const Rational& r, const Grid& grid) {
    const Rational rad = radius(i);
    if (!(r < rad))
        throw PreconditionError("box size " + r.to_string() + " must be below the bar radius " + rad.to_string());
    Rational delta = (rad - r) / 2;
    const auto outward = [&](const std::vector<Rational>& ts) {
        for (const auto& t : ts) {
            if (r < t)
                delta = mpers::min(delta, (t - r) / 2);
            if (t < -r)
                delta = mpers::min(delta, (-r - t) / 2);
        }
    };
    outward(gridline_hits(i.u, grid));
    outward(upper_offsets(i, grid));
    return delta;
}

struct BoxSum {
    std::int64_t value;    // four-term alternating sum of ranks at the corners
    std::size_t quotient;  // BD(I^{+}_{+}) / (BD(I^{+}_{-}) join BD(I^{-}_{+}))
    Rational delta;        // the delta actually used
};

/// Sum of the diagram over the box of size r + delta around i. A requested
/// delta larger than the default is shrunk to it.
template <CoefficientField F>
BoxSum box_sum(const RankFunction<F>& rf, int d, const Bar& i, const Rational& r, const Grid& grid,
               const std::optional<Rational>& delta = std::nullopt) {
    if (r.sign() < 0)
        throw PreconditionError("box size must be nonnegative");
    Rational dl = default_box_delta(i, r, grid);
    if (delta) {
        if (delta->sign() <= 0)
            throw PreconditionError("delta must be positive");
        dl = mpers::min(dl, *delta);
    }
    const Rational rho = r + dl;
    const Bar pp{shifted(i.u, rho), shifted(i.v, rho)};
    const Bar pm{shifted(i.u, rho), shifted(i.v, -rho)};
    const Bar mp{shifted(i.u, -rho), shifted(i.v, rho)};
    const Bar mm{shifted(i.u, -rho), shifted(i.v, -rho)};
    const auto r_ = [&](const Bar& b) { return static_cast<std::int64_t>(rf.rank(d, b)); };
    const std::int64_t value = r_(pp) - r_(pm) - r_(mp) + r_(mm);
    const std::size_t q = quotient_dim(rf.birth_death(d, pp), join(rf.birth_death(d, pm), rf.birth_death(d, mp)));
    return {value, q, dl};
}

/// The same box sum by enumerating every vertex of the bar poset inside the box.
template <CoefficientField F>
std::int64_t box_support_sum(const RankFunction<F>& rf, int d, const Bar& i, const Rational& rho, const Grid& grid) {
    std::int64_t total = 0;
    for (const auto& a : gridline_hits(i.u, grid, -rho, rho))
        for (const auto& b : upper_offsets(i, grid, -rho, rho)) {
            const Bar j{shifted(i.u, a), shifted(i.v, b)};
            if (leq(j.u, j.v))
                total += mobius_inversion_at(rf, d, j, grid);
        }
    return total;
}

/// An interval of diagonal offsets (second minus first coordinate); missing
/// ends are infinite. Either a single critical offset or an open interval.
struct OffsetInterval {
    std::optional<Rational> lo;
    std::optional<Rational> hi;

    bool is_point() const { return lo && hi && *lo == *hi; }
    friend bool operator==(const OffsetInterval&, const OffsetInterval&) = default;
};

struct Stratum {
    OffsetInterval u_offset;
    OffsetInterval v_offset;
    friend bool operator==(const Stratum&, const Stratum&) = default;
};

struct DiagramEntry {
    std::int64_t mass = 0;
    std::optional<Stratum> stratum;
    friend bool operator==(const DiagramEntry&, const DiagramEntry&) = default;
};

/// Finitely many point masses of a persistence diagram, ordered by (u, v).
class Diagram {
public:
    Diagram(std::size_t n_params, std::string field) : n_(n_params), field_(std::move(field)) {}

    std::size_t n_params() const noexcept { return n_; }
    const std::string& field() const noexcept { return field_; }
    const std::map<Bar, DiagramEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Adds mass at a bar; zero masses are ignored and repeated bars accumulate.
    void add(const Bar& bar, std::int64_t mass, std::optional<Stratum> stratum = std::nullopt) {
        if (bar.u.size() != n_ || bar.v.size() != n_)
            throw DimensionMismatch("bar " + to_string(bar) + " does not have " + std::to_string(n_) + " parameters");
        if (!leq(bar.u, bar.v))
            throw PreconditionError("bar " + to_string(bar) + " has u not <= v");
        if (mass < 0)
            throw PreconditionError("negative mass at " + to_string(bar));
        if (mass == 0)
            return;
        auto& e = entries_[bar];
        e.mass += mass;
        if (stratum)
            e.stratum = std::move(stratum);
    }

    std::int64_t mass(const Bar& bar) const {
        const auto it = entries_.find(bar);
        return it == entries_.end() ? 0 : it->second.mass;
    }

    std::int64_t total_mass() const {
        std::int64_t m = 0;
        for (const auto& [b, e] : entries_)
            m += e.mass;
        return m;
    }

    const std::optional<Grid>& grid() const noexcept { return grid_; }
    void set_grid(Grid g) { grid_ = std::move(g); }

    friend bool operator==(const Diagram& a, const Diagram& b) {
        return a.n_ == b.n_ && a.field_ == b.field_ && a.entries_ == b.entries_;
    }

private:
    std::size_t n_;
    std::string field_;
    std::map<Bar, DiagramEntry> entries_;
    std::optional<Grid> grid_;
};

/// The nonzero values of the diagram on bars (u0 + a, v0 + b), i.e. on the
/// diagonal line through u0 paired with the one through v0. With a window
/// (lo, hi) only bars with lo <= u and v <= hi are reported.
template <CoefficientField F>
std::vector<std::pair<Bar, std::int64_t>> support_on_lines(const RankFunction<F>& rf, int d, const Point& u0,
                                                           const Point& v0, const Grid& grid,
                                                           const std::optional<Bar>& window = std::nullopt) {
    using Cell = typename RankFunction<F>::Cell;
    const auto tu = gridline_hits(u0, grid);
    const auto tv = upper_offsets(Bar{u0, v0}, grid);
    std::vector<Point> us, vs;
    std::vector<Cell> cu, cv;
    for (const auto& t : tu) {
        us.push_back(shifted(u0, t));
        cu.push_back(rf.cell(us.back()));
    }
    for (const auto& t : tv) {
        vs.push_back(shifted(v0, t));
        cv.push_back(rf.cell(vs.back()));
    }
    const auto r = [&](std::size_t i, std::size_t j) { return static_cast<std::int64_t>(rf.rank(d, cu[i], cv[j])); };

    std::vector<std::pair<Bar, std::int64_t>> out;
    for (std::size_t i = 0; i < us.size(); ++i) {
        if (window && !(leq(window->u, us[i]) && leq(us[i], window->v)))
            continue;
        for (std::size_t j = 0; j < vs.size(); ++j) {
            if (!leq(us[i], vs[j]))
                continue;
            if (window && !leq(vs[j], window->v))
                continue;
            std::int64_t value = r(i, j);
            const bool has_j1 = i > 0;
            const bool has_j2 = j > 0 && leq(us[i], vs[j - 1]);
            if (has_j1)
                value -= r(i - 1, j);
            if (has_j2)
                value -= r(i, j - 1);
            if (has_j1 && has_j2)
                value += r(i - 1, j - 1);
            if (value != 0)
                out.push_back({Bar{us[i], vs[j]}, value});
        }
    }
    return out;
}

/// Sorted critical diagonal offsets for n = 2 inside a window: differences of
/// grid values, offsets where a gridline hit crosses the window boundary, and
/// the offsets of the window corners.
inline std::vector<Rational> critical_offsets(const Grid& grid, const Bar& window) {
    const auto& s = grid.values();
    const Rational &a1 = window.u[0], &a2 = window.u[1], &b1 = window.v[0], &b2 = window.v[1];
    std::vector<Rational> c{a2 - a1, b2 - b1, a2 - b1, b2 - a1};
    for (const auto& x : s) {
        for (const auto& y : s)
            c.push_back(y - x);
        c.push_back(a2 - x);
        c.push_back(b2 - x);
        c.push_back(x - a1);
        c.push_back(x - b1);
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

/// Offsets of the upper diagonal that become critical once the lower one is
/// fixed at cu: where a radius-zero vertex crosses a gridline or the window.
inline std::vector<Rational> critical_upper_offsets(const Grid& grid, const Bar& window, const Rational& cu) {
    auto c = critical_offsets(grid, window);
    std::vector<Rational> ys = grid.values();
    ys.push_back(window.v[0]);
    ys.push_back(window.v[1]);
    c.push_back(cu);
    for (const auto& x : grid.values())
        for (const auto& y : ys) {
            c.push_back(cu + (x - y));
            c.push_back(cu - (x - y));
        }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

/// One representative offset per stratum of the offset line: every critical
/// offset and the midpoint of each gap between consecutive ones, restricted
/// to lines that meet the window.
inline std::vector<std::pair<Rational, OffsetInterval>> representative_offsets(const std::vector<Rational>& c,
                                                                               const Bar& window) {
    const Rational lowest = window.u[1] - window.v[0];
    const Rational highest = window.v[1] - window.u[0];
    std::vector<std::pair<Rational, OffsetInterval>> reps;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (lowest <= c[k] && c[k] <= highest)
            reps.push_back({c[k], {c[k], c[k]}});
        if (k + 1 < c.size()) {
            const Rational mid = (c[k] + c[k + 1]) / 2;
            if (lowest < mid && mid < highest)
                reps.push_back({mid, {c[k], c[k + 1]}});
        }
    }
    return reps;
}

inline std::vector<std::pair<Rational, OffsetInterval>> representative_offsets(const Grid& grid, const Bar& window) {
    return representative_offsets(critical_offsets(grid, window), window);
}

/// Point-mass description of the diagram inside the window (u, v) of bars
/// with window.u <= J.u and J.v <= window.v. For n = 1 this is the whole
/// support there. For n = 2 one representative line pair is evaluated per
/// pair of offset strata; each reported bar carries its strata. The upper
/// strata are those seen at the representative lower offset.
template <CoefficientField F>
Diagram support_in_window(const RankFunction<F>& rf, int d, const Bar& window, const Grid& grid) {
    const std::size_t n = rf.complex().n_params();
    if (window.u.size() != n || window.v.size() != n)
        throw DimensionMismatch("window does not match the number of parameters");
    if (!leq(window.u, window.v))
        throw PreconditionError("window must satisfy lower corner <= upper corner");
    Diagram out(n, rf.complex().field().name());
    out.set_grid(grid);
    if (n == 1) {
        for (auto& [bar, mass] : support_on_lines(rf, d, Point{Rational(0)}, Point{Rational(0)}, grid, window))
            out.add(bar, mass);
        return out;
    }
    if (n != 2)
        throw UnsupportedDimension("exhaustive support enumeration is implemented for n <= 2, got n = " +
                                   std::to_string(n));
    const auto reps = representative_offsets(grid, window);
    std::vector<std::vector<std::pair<Bar, std::pair<std::int64_t, Stratum>>>> found(reps.size());
    parallel_for(reps.size(), [&](std::size_t a) {
        const auto& [cu, su] = reps[a];
        for (const auto& [cv, sv] : representative_offsets(critical_upper_offsets(grid, window, cu), window)) {
            const Point u0{Rational(0), cu};
            const Point v0{Rational(0), cv};
            for (auto& [bar, mass] : support_on_lines(rf, d, u0, v0, grid, window))
                found[a].push_back({std::move(bar), {mass, Stratum{su, sv}}});
        }
    });
    for (auto& bucket : found)
        for (auto& [bar, entry] : bucket)
            out.add(bar, entry.first, entry.second);
    return out;
}

} // namespace mpers
