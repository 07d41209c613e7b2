#pragma once

// Hausdorff bar distance, bottleneck matchings between point-mass diagrams,
// shift interleavings of one-critical complexes on a common simplex set,
// the interpolating family, and the box stability inequality.

#include <algorithm>
#include <cstdint>
#include <map>
#include <tuple>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

#include "diagram.hpp"
#include "errors.hpp"
#include "exactnum.hpp"
#include "filtration.hpp"

namespace mpers {

/// max(|a|, |b|) when J = (u + a, v + b) for constant vectors a, b;
/// nullopt (infinite) otherwise.
inline std::optional<Rational> hausdorff_bar_distance(const Bar& i, const Bar& j) {
    if (i.n_params() != j.n_params())
        throw DimensionMismatch("bars with different numbers of parameters");
    const auto a = constant_difference(i.u, j.u);
    const auto b = constant_difference(i.v, j.v);
    if (!a || !b)
        return std::nullopt;
    return mpers::max(a->abs(), b->abs());
}

/// The diagonal bar (u + r, v - r), r = radius.
inline Bar nearest_diagonal(const Bar& i) {
    const Rational r = radius(i);
    return {shifted(i.u, r), shifted(i.v, -r)};
}

struct MatchedPair {
    Bar from;
    Bar to;
    std::int64_t mass;
    Rational cost;
};

/// Mass moved between a bar and its nearest diagonal bar.
struct DiagonalAssignment {
    Bar bar;
    std::int64_t mass;
    Rational cost;
};

struct Matching {
    std::vector<MatchedPair> pairs;
    std::vector<DiagonalAssignment> to_diagonal;   // bars of the first diagram
    std::vector<DiagonalAssignment> from_diagonal; // bars of the second diagram

    /// Largest cost used; zero for the empty matching.
    Rational norm() const {
        Rational n = 0;
        for (const auto& p : pairs)
            n = mpers::max(n, p.cost);
        for (const auto& d : to_diagonal)
            n = mpers::max(n, d.cost);
        for (const auto& d : from_diagonal)
            n = mpers::max(n, d.cost);
        return n;
    }
};

/// Both marginal conditions hold on the off-diagonal bars, with exact costs.
inline bool is_valid_matching(const Matching& m, const Diagram& x, const Diagram& y) {
    std::map<Bar, std::int64_t> xs, ys;
    for (const auto& p : m.pairs) {
        const auto h = hausdorff_bar_distance(p.from, p.to);
        if (p.mass <= 0 || !h || *h != p.cost)
            return false;
        xs[p.from] += p.mass;
        ys[p.to] += p.mass;
    }
    for (const auto& d : m.to_diagonal) {
        if (d.mass <= 0 || d.cost != radius(d.bar))
            return false;
        xs[d.bar] += d.mass;
    }
    for (const auto& d : m.from_diagonal) {
        if (d.mass <= 0 || d.cost != radius(d.bar))
            return false;
        ys[d.bar] += d.mass;
    }
    const auto marginal_ok = [](const Diagram& dgm, std::map<Bar, std::int64_t>& used) {
        for (const auto& [bar, e] : dgm.entries()) {
            if (radius(bar).is_zero())
                continue;
            const auto it = used.find(bar);
            if (it == used.end() || it->second != e.mass)
                return false;
            used.erase(it);
        }
        return std::all_of(used.begin(), used.end(), [](const auto& kv) { return radius(kv.first).is_zero(); });
    };
    return marginal_ok(x, xs) && marginal_ok(y, ys);
}

struct BottleneckResult {
    std::optional<Rational> norm; // nullopt means infinite
    Matching matching;
    std::size_t dropped_diagonal = 0; // bars of radius zero, which no matching constrains
};

namespace detail {

class FlowNetwork {
    using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;

public:
    using Graph = boost::adjacency_list<
        boost::vecS, boost::vecS, boost::directedS, boost::no_property,
        boost::property<boost::edge_capacity_t, std::int64_t,
                        boost::property<boost::edge_residual_capacity_t, std::int64_t,
                                        boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
    using Edge = Traits::edge_descriptor;

    explicit FlowNetwork(std::size_t vertices) : g_(vertices) {}

    Edge add(std::size_t from, std::size_t to, std::int64_t capacity) {
        auto cap = boost::get(boost::edge_capacity, g_);
        auto rev = boost::get(boost::edge_reverse, g_);
        const Edge e = boost::add_edge(from, to, g_).first;
        const Edge r = boost::add_edge(to, from, g_).first;
        cap[e] = capacity;
        cap[r] = 0;
        rev[e] = r;
        rev[r] = e;
        return e;
    }

    std::int64_t max_flow(std::size_t s, std::size_t t) { return boost::push_relabel_max_flow(g_, s, t); }

    std::int64_t flow(Edge e) const {
        return boost::get(boost::edge_capacity, g_)[e] - boost::get(boost::edge_residual_capacity, g_)[e];
    }

private:
    Graph g_;
};

struct Weighted {
    Bar bar;
    std::int64_t mass;
    Rational radius;
};

inline std::vector<Weighted> off_diagonal(const Diagram& d, std::size_t& dropped) {
    std::vector<Weighted> out;
    for (const auto& [bar, e] : d.entries()) {
        Rational r = radius(bar);
        if (r.is_zero()) {
            ++dropped;
            continue;
        }
        out.push_back({bar, e.mass, std::move(r)});
    }
    return out;
}

// Max-flow feasibility of a matching of norm <= theta; fills `m` on success.
inline bool feasible(const std::vector<Weighted>& xs, const std::vector<Weighted>& ys,
                     const std::vector<std::vector<std::optional<Rational>>>& dh, const Rational& theta, Matching* m) {
    const std::size_t nx = xs.size(), ny = ys.size();
    const std::size_t source = nx + ny, sink = source + 1, diag_left = sink + 1, diag_right = diag_left + 1;
    std::int64_t mass_x = 0, mass_y = 0;
    for (const auto& x : xs)
        mass_x += x.mass;
    for (const auto& y : ys)
        mass_y += y.mass;

    FlowNetwork net(nx + ny + 4);
    std::vector<std::tuple<std::size_t, std::size_t, FlowNetwork::Edge>> pair_edges;
    std::vector<std::pair<std::size_t, FlowNetwork::Edge>> x_diag, y_diag;
    for (std::size_t i = 0; i < nx; ++i) {
        net.add(source, i, xs[i].mass);
        for (std::size_t j = 0; j < ny; ++j)
            if (dh[i][j] && *dh[i][j] <= theta)
                pair_edges.emplace_back(i, j, net.add(i, nx + j, xs[i].mass));
        if (xs[i].radius <= theta)
            x_diag.emplace_back(i, net.add(i, diag_right, xs[i].mass));
    }
    net.add(source, diag_left, mass_y);
    for (std::size_t j = 0; j < ny; ++j) {
        net.add(nx + j, sink, ys[j].mass);
        if (ys[j].radius <= theta)
            y_diag.emplace_back(j, net.add(diag_left, nx + j, ys[j].mass));
    }
    net.add(diag_left, diag_right, mass_x + mass_y);
    net.add(diag_right, sink, mass_x);

    if (net.max_flow(source, sink) != mass_x + mass_y)
        return false;
    if (m) {
        *m = {};
        for (const auto& [i, j, e] : pair_edges)
            if (const auto f = net.flow(e); f > 0)
                m->pairs.push_back({xs[i].bar, ys[j].bar, f, *dh[i][j]});
        for (const auto& [i, e] : x_diag)
            if (const auto f = net.flow(e); f > 0)
                m->to_diagonal.push_back({xs[i].bar, f, xs[i].radius});
        for (const auto& [j, e] : y_diag)
            if (const auto f = net.flow(e); f > 0)
                m->from_diagonal.push_back({ys[j].bar, f, ys[j].radius});
    }
    return true;
}

} // namespace detail

/// Exact bottleneck distance between two point-mass diagrams with a witness.
/// The optimum is one of the realised costs (a finite D_H between bars or a
/// radius), so those are searched with a max-flow feasibility test.
inline BottleneckResult bottleneck(const Diagram& x, const Diagram& y) {
    if (x.n_params() != y.n_params())
        throw DimensionMismatch("diagrams have " + std::to_string(x.n_params()) + " and " +
                                std::to_string(y.n_params()) + " parameters");
    BottleneckResult result;
    const auto xs = detail::off_diagonal(x, result.dropped_diagonal);
    const auto ys = detail::off_diagonal(y, result.dropped_diagonal);

    std::vector<std::vector<std::optional<Rational>>> dh(xs.size(), std::vector<std::optional<Rational>>(ys.size()));
    std::vector<Rational> candidates{Rational(0)};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        candidates.push_back(xs[i].radius);
        for (std::size_t j = 0; j < ys.size(); ++j)
            if ((dh[i][j] = hausdorff_bar_distance(xs[i].bar, ys[j].bar)))
                candidates.push_back(*dh[i][j]);
    }
    for (const auto& y_ : ys)
        candidates.push_back(y_.radius);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // the largest candidate is always feasible: every bar can reach the diagonal
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (detail::feasible(xs, ys, dh, candidates[mid], nullptr))
            hi = mid;
        else
            lo = mid + 1;
    }
    if (!detail::feasible(xs, ys, dh, candidates[lo], &result.matching))
        return result;
    result.norm = candidates[lo];
    return result;
}

/// Shift interleaving of two one-critical complexes on the same simplices:
/// F(u) is contained in G(u + eps) and G(u) in F(u + eps).
struct InterleavingWitness {
    Rational epsilon;
    bool f_into_g = false; // grade_G <= grade_F + eps for every simplex
    bool g_into_f = false; // grade_F <= grade_G + eps for every simplex

    bool valid() const { return f_into_g && g_into_f; }
};

template <CoefficientField F>
void require_same_simplices(const GradedComplex<F>& f, const GradedComplex<F>& g) {
    if (f.n_params() != g.n_params())
        throw DimensionMismatch("complexes have different numbers of parameters");
    if (f.top_dim() != g.top_dim())
        throw PreconditionError("complexes have different simplex sets");
    for (int d = 0; d <= f.top_dim(); ++d) {
        const auto a = f.simplices(d), b = g.simplices(d);
        if (a.size() != b.size())
            throw PreconditionError("complexes have different simplex sets in dimension " + std::to_string(d));
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].vertices != b[i].vertices)
                throw PreconditionError("complexes have different simplex sets in dimension " + std::to_string(d));
    }
}

template <CoefficientField F>
bool shift_holds(const GradedComplex<F>& f, const GradedComplex<F>& g, const Rational& eps) {
    for (int d = 0; d <= f.top_dim(); ++d) {
        const auto a = f.simplices(d), b = g.simplices(d);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!leq(b[i].grade, shifted(a[i].grade, eps)))
                return false;
    }
    return true;
}

/// epsilon = max over simplices of the sup-norm of the grade difference.
template <CoefficientField F>
InterleavingWitness shift_interleaving_bound(const GradedComplex<F>& f, const GradedComplex<F>& g) {
    require_same_simplices(f, g);
    InterleavingWitness w{Rational(0)};
    for (int d = 0; d <= f.top_dim(); ++d) {
        const auto a = f.simplices(d), b = g.simplices(d);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t k = 0; k < a[i].grade.size(); ++k)
                w.epsilon = mpers::max(w.epsilon, (a[i].grade[k] - b[i].grade[k]).abs());
    }
    w.f_into_g = shift_holds(f, g, w.epsilon);
    w.g_into_f = shift_holds(g, f, w.epsilon);
    return w;
}

/// K(t) with sigma in K(t)(u) iff sigma in F(u + eps t) and sigma in
/// G(u + eps (1 - t)); grades are max(grade_F - eps t, grade_G - eps (1 - t)).
template <CoefficientField F>
GradedComplex<F> interpolate(const GradedComplex<F>& f, const GradedComplex<F>& g, const Rational& eps,
                             const Rational& t) {
    const InterleavingWitness w = shift_interleaving_bound(f, g);
    if (eps < w.epsilon)
        throw PreconditionError("eps = " + eps.to_string() + " is below the shift bound " + w.epsilon.to_string());
    if (t.sign() < 0 || Rational(1) < t)
        throw PreconditionError("t must lie in [0, 1]");
    const Rational sf = eps * t, sg = eps * (Rational(1) - t);
    std::vector<Simplex> out;
    for (int d = 0; d <= f.top_dim(); ++d) {
        const auto a = f.simplices(d), b = g.simplices(d);
        for (std::size_t i = 0; i < a.size(); ++i) {
            Point grade(a[i].grade.size());
            for (std::size_t k = 0; k < grade.size(); ++k)
                grade[k] = mpers::max(a[i].grade[k] - sf, b[i].grade[k] - sg);
            out.push_back({a[i].vertices, std::move(grade)});
        }
    }
    return GradedComplex<F>(f.field(), f.n_params(), std::move(out));
}

struct BoxStability {
    std::int64_t lhs; // box of size r + delta for F
    std::int64_t rhs; // box of size r + delta + eps for G
    Rational delta;
    bool holds;
};

/// Evaluates both sides of the box stability inequality with one delta
/// valid for both complexes.
template <CoefficientField F>
BoxStability box_stability_check(const RankFunction<F>& f, const RankFunction<F>& g, int d, const Bar& i,
                                 const Rational& r, const Rational& eps) {
    if (!(r + eps < radius(i)))
        throw PreconditionError("box stability needs radius(I) > r + eps");
    if (eps.sign() < 0)
        throw PreconditionError("eps must be nonnegative");
    const InterleavingWitness w = shift_interleaving_bound(f.complex(), g.complex());
    if (!(w.valid() && w.epsilon <= eps))
        throw PreconditionError("the complexes are not eps-interleaved by a shift (bound " + w.epsilon.to_string() +
                                ")");
    const Grid gf = critical_grid(f.complex()), gg = critical_grid(g.complex());
    const Rational delta = mpers::min(default_box_delta(i, r, gf), default_box_delta(i, r + eps, gg));
    const BoxSum lhs = box_sum(f, d, i, r, gf, delta);
    const BoxSum rhs = box_sum(g, d, i, r + eps, gg, delta);
    return {lhs.value, rhs.value, delta, lhs.value <= rhs.value};
}

/// Half the smallest gap of the grid.
inline std::optional<Rational> injectivity_radius(const Grid& grid) { return grid.injectivity_radius(); }

/// The hypothesis of the easy bijection lemma: the interleaving bound is
/// below half the injectivity radius of F's grid.
inline bool easy_bijection_applies(const Grid& grid, const Rational& bound) {
    const auto rho = injectivity_radius(grid);
    return !rho || bound < *rho / 2;
}

} // namespace mpers
