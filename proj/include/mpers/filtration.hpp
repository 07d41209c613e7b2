#pragma once

// One-critical n-filtrations of reduced simplicial chain complexes:
// multi-metric Vietoris-Rips and Cech constructions, critical grids, and the
// chain / cycle / boundary subspaces of F_d(infinity) at a point of R^n.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exactnum.hpp"
#include "linalg.hpp"

namespace mpers {

/// A point of R^n with exact coordinates.
using Point = std::vector<Rational>;

/// Componentwise u <= v.
inline bool leq(const Point& u, const Point& v) {
    if (u.size() != v.size())
        throw DimensionMismatch("points of different dimension");
    for (std::size_t i = 0; i < u.size(); ++i)
        if (v[i] < u[i])
            return false;
    return true;
}

/// p + t * (1, ..., 1)
inline Point shifted(const Point& p, const Rational& t) {
    Point q(p);
    for (auto& x : q)
        x += t;
    return q;
}

inline Point constant_point(std::size_t n, const Rational& value) { return Point(n, value); }

inline std::string to_string(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i)
        s += (i ? "," : "") + p[i].to_string();
    return s + ")";
}

/// Finite set X with n dissimilarity functions d_1..d_n on it.
class MultiMetricSpace {
public:
    MultiMetricSpace(std::size_t points, std::vector<std::vector<Rational>> metrics)
        : points_(points), metrics_(std::move(metrics)) {
        if (metrics_.empty())
            throw PreconditionError("a multi-metric space needs at least one metric");
        for (std::size_t m = 0; m < metrics_.size(); ++m) {
            const auto& d = metrics_[m];
            if (d.size() != points_ * points_)
                throw DimensionMismatch("metric " + std::to_string(m + 1) + " is not a " + std::to_string(points_) +
                                        "x" + std::to_string(points_) + " matrix");
            for (std::size_t i = 0; i < points_; ++i) {
                if (!d[i * points_ + i].is_zero())
                    throw PreconditionError("metric " + std::to_string(m + 1) + " has a nonzero diagonal entry");
                for (std::size_t j = 0; j < points_; ++j) {
                    if (d[i * points_ + j].sign() < 0)
                        throw PreconditionError("metric " + std::to_string(m + 1) + " has a negative entry");
                    if (d[i * points_ + j] != d[j * points_ + i])
                        throw PreconditionError("metric " + std::to_string(m + 1) + " is not symmetric at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
                }
            }
        }
    }

    std::size_t point_count() const noexcept { return points_; }
    std::size_t metric_count() const noexcept { return metrics_.size(); }

    const Rational& distance(std::size_t metric, std::size_t a, std::size_t b) const {
        return metrics_[metric][a * points_ + b];
    }

    const std::vector<Rational>& metric(std::size_t m) const { return metrics_.at(m); }

private:
    std::size_t points_;
    std::vector<std::vector<Rational>> metrics_;
};

struct Simplex {
    std::vector<std::uint32_t> vertices; // strictly increasing
    Point grade;                         // the unique minimal grade

    int dim() const noexcept { return static_cast<int>(vertices.size()) - 1; }

    friend bool operator==(const Simplex&, const Simplex&) = default;
};

/// Sorted, duplicate-free set S of critical values; S^n and |S^n| are implied.
class Grid {
public:
    Grid(std::vector<Rational> values, std::size_t n_params) : values_(std::move(values)), n_params_(n_params) {
        std::sort(values_.begin(), values_.end());
        values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
        if (values_.empty())
            throw PreconditionError("a grid needs at least one value");
        if (n_params_ == 0)
            throw PreconditionError("a grid needs at least one parameter");
    }

    const std::vector<Rational>& values() const noexcept { return values_; }
    std::size_t n_params() const noexcept { return n_params_; }
    std::size_t size() const noexcept { return values_.size(); }
    const Rational& min() const { return values_.front(); }
    const Rational& max() const { return values_.back(); }

    bool contains_value(const Rational& x) const { return std::binary_search(values_.begin(), values_.end(), x); }

    /// p lies on |S^n|: some coordinate is a grid value.
    bool on_gridlines(const Point& p) const {
        return std::any_of(p.begin(), p.end(), [&](const Rational& x) { return contains_value(x); });
    }

    /// Index of the largest grid value <= x, or -1 if x < min.
    int floor_index(const Rational& x) const {
        const auto it = std::upper_bound(values_.begin(), values_.end(), x);
        return static_cast<int>(it - values_.begin()) - 1;
    }

    /// Largest grid value strictly below x.
    std::optional<Rational> value_below(const Rational& x) const {
        const auto it = std::lower_bound(values_.begin(), values_.end(), x);
        if (it == values_.begin())
            return std::nullopt;
        return *std::prev(it);
    }

    /// Smallest grid value strictly above x.
    std::optional<Rational> value_above(const Rational& x) const {
        const auto it = std::upper_bound(values_.begin(), values_.end(), x);
        if (it == values_.end())
            return std::nullopt;
        return *it;
    }

    /// Per-coordinate floor indices; points with equal cells see identical
    /// chain, cycle and boundary spaces for any complex graded in S.
    std::vector<int> cell(const Point& p) const {
        std::vector<int> c(p.size());
        for (std::size_t i = 0; i < p.size(); ++i)
            c[i] = floor_index(p[i]);
        return c;
    }

    /// The maximal grid point (s_max, ..., s_max).
    Point top() const { return constant_point(n_params_, max()); }

    Grid refined(std::span<const Rational> extra) const {
        std::vector<Rational> v = values_;
        v.insert(v.end(), extra.begin(), extra.end());
        return Grid(std::move(v), n_params_);
    }

    /// Half the smallest gap between consecutive values; nullopt for a single value.
    std::optional<Rational> injectivity_radius() const {
        if (values_.size() < 2)
            return std::nullopt;
        Rational gap = values_[1] - values_[0];
        for (std::size_t i = 2; i < values_.size(); ++i)
            gap = mpers::min(gap, values_[i] - values_[i - 1]);
        return gap / 2;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::vector<Rational> values_;
    std::size_t n_params_;
};

/// A finite simplicial complex with a one-critical grading by R^n, as a
/// reduced chain complex: dimension -1 holds the empty simplex (present at
/// every grade) and boundary(0) is the augmentation.
template <CoefficientField F>
class GradedComplex {
public:
    using Field = F;

    /// Validates closure under faces, monotone grades and one-criticality,
    /// then builds the boundary matrices with the (-1)^k sign convention on
    /// ascending vertex lists. Simplices are stored in canonical order
    /// (dimension, then lexicographic vertices).
    GradedComplex(F field, std::size_t n_params, std::vector<Simplex> simplices)
        : field_(std::move(field)), n_params_(n_params) {
        if (n_params_ == 0)
            throw PreconditionError("a filtration needs at least one parameter");
        for (auto& s : simplices) {
            if (s.vertices.empty())
                throw PreconditionError("the empty simplex is implicit and must not be listed");
            if (!std::is_sorted(s.vertices.begin(), s.vertices.end()) ||
                std::adjacent_find(s.vertices.begin(), s.vertices.end()) != s.vertices.end()) {
                std::sort(s.vertices.begin(), s.vertices.end());
                if (std::adjacent_find(s.vertices.begin(), s.vertices.end()) != s.vertices.end())
                    throw PreconditionError("simplex with a repeated vertex");
            }
            if (s.grade.size() != n_params_)
                throw DimensionMismatch("simplex grade has " + std::to_string(s.grade.size()) +
                                        " coordinates, expected " + std::to_string(n_params_));
            const std::size_t d = s.vertices.size() - 1;
            if (by_dim_.size() <= d)
                by_dim_.resize(d + 1);
            by_dim_[d].push_back(std::move(s));
        }
        for (auto& layer : by_dim_)
            std::sort(layer.begin(), layer.end(),
                      [](const Simplex& a, const Simplex& b) { return a.vertices < b.vertices; });
        index_.resize(by_dim_.size());
        for (std::size_t d = 0; d < by_dim_.size(); ++d)
            for (std::size_t i = 0; i < by_dim_[d].size(); ++i) {
                if (!index_[d].emplace(by_dim_[d][i].vertices, i).second)
                    throw PreconditionError("simplex " + vertex_string(by_dim_[d][i].vertices) +
                                            " listed twice (multi-critical grading is not supported)");
            }
        build_boundaries();
    }

    const F& field() const noexcept { return field_; }
    std::size_t n_params() const noexcept { return n_params_; }

    /// Largest simplex dimension, -1 for the empty complex.
    int top_dim() const noexcept { return static_cast<int>(by_dim_.size()) - 1; }

    /// Number of d-simplices; one for d = -1, zero beyond the top.
    std::size_t size(int d) const noexcept {
        if (d == -1)
            return 1;
        if (d < -1 || d > top_dim())
            return 0;
        return by_dim_[static_cast<std::size_t>(d)].size();
    }

    std::size_t total_size() const noexcept {
        std::size_t n = 0;
        for (const auto& l : by_dim_)
            n += l.size();
        return n;
    }

    std::span<const Simplex> simplices(int d) const {
        if (d < 0 || d > top_dim())
            return {};
        return by_dim_[static_cast<std::size_t>(d)];
    }

    const Simplex& simplex(int d, std::size_t i) const { return by_dim_.at(static_cast<std::size_t>(d)).at(i); }

    std::optional<std::size_t> index_of(const std::vector<std::uint32_t>& vertices) const {
        const std::size_t d = vertices.size() - 1;
        if (vertices.empty() || d >= index_.size())
            return std::nullopt;
        const auto it = index_[d].find(vertices);
        if (it == index_[d].end())
            return std::nullopt;
        return it->second;
    }

    /// The boundary map C_d -> C_{d-1}, size(d-1) x size(d).
    const SparseMatrix<F>& boundary(int d) const {
        if (d < 0)
            throw PreconditionError("boundary(d) requires d >= 0");
        if (d > top_dim()) {
            if (static_cast<std::size_t>(d) >= empty_boundaries_.size())
                empty_boundaries_.resize(static_cast<std::size_t>(d) + 1, SparseMatrix<F>(field_, 0, 0));
            empty_boundaries_[static_cast<std::size_t>(d)] = SparseMatrix<F>(field_, size(d - 1), 0);
            return empty_boundaries_[static_cast<std::size_t>(d)];
        }
        return boundary_[static_cast<std::size_t>(d)];
    }

    /// Indices of d-simplices whose grade is <= u.
    std::vector<std::size_t> present(int d, const Point& u) const {
        std::vector<std::size_t> out;
        const auto layer = simplices(d);
        for (std::size_t i = 0; i < layer.size(); ++i)
            if (leq(layer[i].grade, u))
                out.push_back(i);
        return out;
    }

    /// Overwrites a boundary matrix without any checking. Exists for negative
    /// controls of the verification suite.
    void unchecked_replace_boundary(int d, SparseMatrix<F> m) { boundary_.at(static_cast<std::size_t>(d)) = std::move(m); }

    friend bool operator==(const GradedComplex& a, const GradedComplex& b) {
        return a.n_params_ == b.n_params_ && a.field_.name() == b.field_.name() && a.by_dim_ == b.by_dim_;
    }

private:
    static std::string vertex_string(const std::vector<std::uint32_t>& v) {
        std::string s = "{";
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + std::to_string(v[i]);
        return s + "}";
    }

    void build_boundaries() {
        boundary_.clear();
        for (std::size_t d = 0; d < by_dim_.size(); ++d) {
            const int di = static_cast<int>(d);
            SparseMatrix<F> m(field_, size(di - 1), size(di));
            for (std::size_t j = 0; j < by_dim_[d].size(); ++j) {
                const Simplex& s = by_dim_[d][j];
                typename SparseMatrix<F>::Column col;
                if (d == 0) {
                    col.emplace_back(0, field_.one());
                } else {
                    std::vector<std::uint32_t> face;
                    for (std::size_t k = 0; k <= d; ++k) {
                        face.assign(s.vertices.begin(), s.vertices.end());
                        face.erase(face.begin() + static_cast<std::ptrdiff_t>(k));
                        const auto it = index_[d - 1].find(face);
                        if (it == index_[d - 1].end())
                            throw PreconditionError("face " + vertex_string(face) + " of " + vertex_string(s.vertices) +
                                                    " is missing");
                        const Simplex& f = by_dim_[d - 1][it->second];
                        if (!leq(f.grade, s.grade))
                            throw PreconditionError("grade of face " + vertex_string(face) + " exceeds grade of " +
                                                    vertex_string(s.vertices));
                        col.emplace_back(it->second, (k % 2 == 0) ? field_.one() : -field_.one());
                    }
                }
                m.set_column(j, std::move(col));
            }
            boundary_.push_back(std::move(m));
        }
    }

    F field_;
    std::size_t n_params_;
    std::vector<std::vector<Simplex>> by_dim_;
    std::vector<std::map<std::vector<std::uint32_t>, std::size_t>> index_;
    std::vector<SparseMatrix<F>> boundary_;
    mutable std::vector<SparseMatrix<F>> empty_boundaries_;
};

namespace detail {

// Calls visit(vertices) for every subset of {0..n-1} with 1..max_size
// elements, in increasing size-lexicographic order.
template <class Visit>
void for_each_subset(std::size_t n, std::size_t max_size, Visit&& visit) {
    std::vector<std::uint32_t> current;
    const auto recurse = [&](auto&& self, std::uint32_t start) -> void {
        for (std::uint32_t v = start; v < n; ++v) {
            current.push_back(v);
            visit(std::as_const(current));
            if (current.size() < max_size)
                self(self, v + 1);
            current.pop_back();
        }
    };
    if (max_size > 0)
        recurse(recurse, 0);
}

} // namespace detail

/// Multi-metric Vietoris-Rips filtration: sigma enters at u iff every pair in
/// sigma is within u_i in metric i. Simplices up to dimension max_dim.
template <CoefficientField F>
GradedComplex<F> build_vietoris_rips(F field, const MultiMetricSpace& space, int max_dim) {
    if (max_dim < 0)
        throw PreconditionError("max_dim must be nonnegative");
    const std::size_t n = space.metric_count();
    std::vector<Simplex> simplices;
    detail::for_each_subset(space.point_count(), static_cast<std::size_t>(max_dim) + 1,
                            [&](const std::vector<std::uint32_t>& sigma) {
                                Point grade(n, Rational(0));
                                for (std::size_t i = 0; i < n; ++i)
                                    for (std::size_t a = 0; a < sigma.size(); ++a)
                                        for (std::size_t b = a + 1; b < sigma.size(); ++b)
                                            grade[i] = mpers::max(grade[i], space.distance(i, sigma[a], sigma[b]));
                                simplices.push_back({sigma, std::move(grade)});
                            });
    return GradedComplex<F>(std::move(field), n, std::move(simplices));
}

/// Multi-metric Cech filtration with ball centres in X: the i-th grade of
/// sigma is min over x' in X of max over x in sigma of d_i(x, x').
template <CoefficientField F>
GradedComplex<F> build_cech(F field, const MultiMetricSpace& space, int max_dim) {
    if (max_dim < 0)
        throw PreconditionError("max_dim must be nonnegative");
    const std::size_t n = space.metric_count();
    std::vector<Simplex> simplices;
    detail::for_each_subset(space.point_count(), static_cast<std::size_t>(max_dim) + 1,
                            [&](const std::vector<std::uint32_t>& sigma) {
                                Point grade(n);
                                for (std::size_t i = 0; i < n; ++i) {
                                    std::optional<Rational> best;
                                    for (std::size_t w = 0; w < space.point_count(); ++w) {
                                        Rational radius = 0;
                                        for (std::uint32_t x : sigma)
                                            radius = mpers::max(radius, space.distance(i, x, w));
                                        if (!best || radius < *best)
                                            best = radius;
                                    }
                                    grade[i] = *best;
                                }
                                simplices.push_back({sigma, std::move(grade)});
                            });
    return GradedComplex<F>(std::move(field), n, std::move(simplices));
}

/// S = {0} together with every grade coordinate of every simplex.
template <CoefficientField F>
Grid critical_grid(const GradedComplex<F>& complex) {
    std::vector<Rational> values{Rational(0)};
    for (int d = 0; d <= complex.top_dim(); ++d)
        for (const Simplex& s : complex.simplices(d))
            values.insert(values.end(), s.grade.begin(), s.grade.end());
    return Grid(std::move(values), complex.n_params());
}

/// Coordinate subspace of F_d(infinity) spanned by the d-simplices present at u.
template <CoefficientField F>
Subspace<F> chain_space(const GradedComplex<F>& complex, int d, const Point& u) {
    if (d == -1)
        return Subspace<F>::full(complex.field(), 1);
    const auto idx = complex.present(d, u);
    return Subspace<F>::coordinate(complex.field(), complex.size(d), idx);
}

/// Z F_d(u): kernel of the boundary map restricted to the chains present at u.
template <CoefficientField F>
Subspace<F> cycles(const GradedComplex<F>& complex, int d, const Point& u) {
    if (d < 0)
        throw PreconditionError("cycles are only computed in dimensions >= 0");
    const std::size_t ambient = complex.size(d);
    const auto idx = complex.present(d, u);
    if (idx.empty())
        return Subspace<F>::zero(complex.field(), ambient);
    const Matrix<F> restricted = complex.boundary(d).dense_columns(idx);
    const Subspace<F> local = kernel_basis(restricted);
    Matrix<F> embedded(complex.field(), local.dim(), ambient);
    for (std::size_t r = 0; r < local.dim(); ++r)
        for (std::size_t k = 0; k < idx.size(); ++k)
            embedded(r, idx[k]) = local.basis_rows()(r, k);
    return Subspace<F>::span_rows(std::move(embedded));
}

/// B F_d(v): image of the boundary map on the (d+1)-chains present at v.
template <CoefficientField F>
Subspace<F> boundaries(const GradedComplex<F>& complex, int d, const Point& v) {
    if (d < 0)
        throw PreconditionError("boundaries are only computed in dimensions >= 0");
    const auto idx = complex.present(d + 1, v);
    if (idx.empty())
        return Subspace<F>::zero(complex.field(), complex.size(d));
    return Subspace<F>::span_columns(complex.boundary(d + 1).dense_columns(idx));
}

/// Every composite boundary(d) * boundary(d+1) vanishes.
template <CoefficientField F>
bool boundary_squares_to_zero(const GradedComplex<F>& complex) {
    for (int d = 0; d < complex.top_dim(); ++d)
        if (multiply(complex.boundary(d), complex.boundary(d + 1)).nnz() != 0)
            return false;
    return true;
}

/// Reduced homology of the whole complex vanishes in dimensions below the top.
template <CoefficientField F>
bool acyclic_below_top(const GradedComplex<F>& complex) {
    for (int d = 0; d < complex.top_dim(); ++d) {
        const std::size_t z = complex.size(d) - rank(complex.boundary(d));
        const std::size_t b = rank(complex.boundary(d + 1));
        if (z != b)
            return false;
    }
    return true;
}

} // namespace mpers
