#pragma once

// Exact dense/sparse matrices over a coefficient field and the lattice of
// subspaces of a finite-dimensional ambient space (meet, join, quotient).

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exactnum.hpp"

namespace mpers {

/// Dense row-major matrix.
template <CoefficientField F>
class Matrix {
public:
    using Scalar = typename F::Scalar;

    Matrix(F field, std::size_t rows, std::size_t cols)
        : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols, field_.zero()) {}

    static Matrix identity(F field, std::size_t n) {
        Matrix m(field, n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = field.one();
        return m;
    }

    static Matrix from_ints(F field, const std::vector<std::vector<long long>>& rows) {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        Matrix m(field, rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols)
                throw DimensionMismatch("ragged matrix rows");
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = field.from_int(rows[i][j]);
        }
        return m;
    }

    const F& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const Scalar& at(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_)
            throw PreconditionError("matrix index out of range");
        return (*this)(r, c);
    }

    std::span<Scalar> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const Scalar> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b)
            return;
        std::swap_ranges(data_.begin() + a * cols_, data_.begin() + (a + 1) * cols_, data_.begin() + b * cols_);
    }

    /// Appends a row; `values.size()` must equal `cols()`.
    void push_row(std::span<const Scalar> values) {
        if (values.size() != cols_)
            throw DimensionMismatch("row length mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    void truncate_rows(std::size_t n) {
        if (n < rows_) {
            rows_ = n;
            data_.resize(rows_ * cols_, field_.zero());
        }
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Scalar& x) { return x.is_zero(); });
    }

    Matrix transpose() const {
        Matrix t(field_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix select_columns(std::span<const std::size_t> columns) const {
        Matrix out(field_, rows_, columns.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < columns.size(); ++k)
                out(i, k) = (*this)(i, columns[k]);
        return out;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionMismatch("matrix product shape mismatch");
        Matrix out(a.field_, a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Scalar& x = a(i, k);
                if (x.is_zero())
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!b(k, j).is_zero())
                        out(i, j) += x * b(k, j);
            }
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    F field_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Scalar> data_;
};

template <CoefficientField F>
Matrix<F> hconcat(const Matrix<F>& a, const Matrix<F>& b) {
    if (a.rows() != b.rows())
        throw DimensionMismatch("hconcat row mismatch");
    Matrix<F> out(a.field(), a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j)
            out(i, a.cols() + j) = b(i, j);
    }
    return out;
}

/// Column-sparse matrix; each column holds (row, value) pairs sorted by row
/// with no explicit zeros.
template <CoefficientField F>
class SparseMatrix {
public:
    using Scalar = typename F::Scalar;
    using Column = std::vector<std::pair<std::size_t, Scalar>>;

    SparseMatrix(F field, std::size_t rows, std::size_t cols)
        : field_(std::move(field)), rows_(rows), columns_(cols) {}

    static SparseMatrix from_dense(const Matrix<F>& m) {
        SparseMatrix s(m.field(), m.rows(), m.cols());
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t i = 0; i < m.rows(); ++i)
                if (!m(i, j).is_zero())
                    s.columns_[j].emplace_back(i, m(i, j));
        return s;
    }

    const F& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return columns_.size(); }

    const Column& column(std::size_t c) const { return columns_.at(c); }

    void set_column(std::size_t c, Column entries) {
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::erase_if(entries, [](const auto& e) { return e.second.is_zero(); });
        for (const auto& [r, v] : entries)
            if (r >= rows_)
                throw PreconditionError("sparse entry row out of range");
        columns_.at(c) = std::move(entries);
    }

    Scalar at(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols())
            throw PreconditionError("matrix index out of range");
        const Column& col = columns_[c];
        const auto it = std::lower_bound(col.begin(), col.end(), r,
                                         [](const auto& e, std::size_t row) { return e.first < row; });
        return (it != col.end() && it->first == r) ? it->second : field_.zero();
    }

    std::size_t nnz() const {
        std::size_t n = 0;
        for (const auto& c : columns_)
            n += c.size();
        return n;
    }

    double density() const {
        const double cells = static_cast<double>(rows_) * static_cast<double>(cols());
        return cells == 0 ? 0.0 : static_cast<double>(nnz()) / cells;
    }

    Matrix<F> to_dense() const {
        Matrix<F> m(field_, rows_, cols());
        for (std::size_t j = 0; j < cols(); ++j)
            for (const auto& [i, v] : columns_[j])
                m(i, j) = v;
        return m;
    }

    /// Dense copy of the chosen columns, in the given order.
    Matrix<F> dense_columns(std::span<const std::size_t> which) const {
        Matrix<F> m(field_, rows_, which.size());
        for (std::size_t k = 0; k < which.size(); ++k)
            for (const auto& [i, v] : columns_.at(which[k]))
                m(i, k) = v;
        return m;
    }

private:
    F field_;
    std::size_t rows_;
    std::vector<Column> columns_;
};

/// Sparse product a * b.
template <CoefficientField F>
SparseMatrix<F> multiply(const SparseMatrix<F>& a, const SparseMatrix<F>& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("matrix product shape mismatch");
    SparseMatrix<F> out(a.field(), a.rows(), b.cols());
    std::vector<typename F::Scalar> acc(a.rows(), a.field().zero());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        std::fill(acc.begin(), acc.end(), a.field().zero());
        for (const auto& [k, x] : b.column(j))
            for (const auto& [i, y] : a.column(k))
                acc[i] += y * x;
        typename SparseMatrix<F>::Column col;
        for (std::size_t i = 0; i < acc.size(); ++i)
            if (!acc[i].is_zero())
                col.emplace_back(i, acc[i]);
        out.set_column(j, std::move(col));
    }
    return out;
}

namespace detail {

// Row with a nonzero in column `c` among rows [from, rows) having the fewest
// nonzeros to the right of `c`; rows() when the column is empty there.
template <CoefficientField F>
std::size_t sparsest_pivot(const Matrix<F>& m, std::size_t from, std::size_t c) {
    std::size_t best = m.rows();
    std::size_t best_count = 0;
    for (std::size_t i = from; i < m.rows(); ++i) {
        if (m(i, c).is_zero())
            continue;
        std::size_t count = 0;
        for (std::size_t j = c + 1; j < m.cols(); ++j)
            count += !m(i, j).is_zero();
        if (best == m.rows() || count < best_count) {
            best = i;
            best_count = count;
            if (count == 0)
                break;
        }
    }
    return best;
}

} // namespace detail

/// Gaussian elimination in place. With `reduced`, the result is the reduced
/// row echelon form (unit pivots, zeros above them); otherwise only rows below
/// each pivot are cleared. Returns the pivot column of each leading row.
template <CoefficientField F>
std::vector<std::size_t> eliminate(Matrix<F>& m, bool reduced) {
    using Scalar = typename F::Scalar;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        const std::size_t p = detail::sparsest_pivot(m, r, c);
        if (p == m.rows())
            continue;
        m.swap_rows(p, r);
        if (reduced) {
            const Scalar inv = m(r, c).inverse();
            for (std::size_t j = c; j < m.cols(); ++j)
                if (!m(r, j).is_zero())
                    m(r, j) = m(r, j) * inv;
        }
        const Scalar pivot_inv = reduced ? m.field().one() : m(r, c).inverse();
        for (std::size_t i = reduced ? 0 : r + 1; i < m.rows(); ++i) {
            if (i == r || m(i, c).is_zero())
                continue;
            const Scalar factor = m(i, c) * pivot_inv;
            for (std::size_t j = c; j < m.cols(); ++j)
                if (!m(r, j).is_zero())
                    m(i, j) -= factor * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

/// Rank over the coefficient field.
template <CoefficientField F>
std::size_t rank(Matrix<F> m) {
    return eliminate(m, false).size();
}

template <CoefficientField F>
std::size_t rank(const SparseMatrix<F>& m) {
    return rank(m.to_dense());
}

/// A linear subspace of F^ambient, held as a basis in reduced row echelon form
/// (one basis vector per row). The form is canonical, but equality is defined
/// semantically through ranks.
template <CoefficientField F>
class Subspace {
public:
    using Scalar = typename F::Scalar;

    static Subspace zero(F field, std::size_t ambient) { return Subspace(Matrix<F>(field, 0, ambient), {}); }

    static Subspace full(F field, std::size_t ambient) {
        std::vector<std::size_t> pivots(ambient);
        for (std::size_t i = 0; i < ambient; ++i)
            pivots[i] = i;
        return Subspace(Matrix<F>::identity(field, ambient), std::move(pivots));
    }

    /// Span of the rows of `generators` (ambient dimension = its column count).
    static Subspace span_rows(Matrix<F> generators) {
        auto pivots = eliminate(generators, true);
        generators.truncate_rows(pivots.size());
        return Subspace(std::move(generators), std::move(pivots));
    }

    /// Span of the columns of `generators` (ambient dimension = its row count).
    static Subspace span_columns(const Matrix<F>& generators) { return span_rows(generators.transpose()); }

    /// Coordinate subspace spanned by the unit vectors e_i, i in `axes`.
    static Subspace coordinate(F field, std::size_t ambient, std::span<const std::size_t> axes) {
        std::vector<std::size_t> sorted(axes.begin(), axes.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        Matrix<F> rows(field, sorted.size(), ambient);
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            if (sorted[k] >= ambient)
                throw DimensionMismatch("coordinate axis out of range");
            rows(k, sorted[k]) = field.one();
        }
        return Subspace(std::move(rows), std::move(sorted));
    }

    const F& field() const noexcept { return rows_.field(); }
    std::size_t ambient_dim() const noexcept { return rows_.cols(); }
    std::size_t dim() const noexcept { return rows_.rows(); }

    /// Basis vectors as rows, reduced row echelon form.
    const Matrix<F>& basis_rows() const noexcept { return rows_; }
    const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

    /// Basis vectors as the columns of an ambient_dim x dim matrix.
    Matrix<F> basis() const { return rows_.transpose(); }

    /// Residual of `x` after reduction by this basis; zero iff x lies in the span.
    std::vector<Scalar> reduce(std::span<const Scalar> x) const {
        if (x.size() != ambient_dim())
            throw DimensionMismatch("vector length does not match ambient dimension");
        std::vector<Scalar> out(x.begin(), x.end());
        for (std::size_t i = 0; i < dim(); ++i) {
            const Scalar coef = out[pivots_[i]];
            if (coef.is_zero())
                continue;
            const auto r = rows_.row(i);
            for (std::size_t j = pivots_[i]; j < r.size(); ++j)
                if (!r[j].is_zero())
                    out[j] -= coef * r[j];
        }
        return out;
    }

    bool contains_vector(std::span<const Scalar> x) const {
        const auto residual = reduce(x);
        return std::all_of(residual.begin(), residual.end(), [](const Scalar& s) { return s.is_zero(); });
    }

    /// span(other) is a subset of span(*this).
    bool contains(const Subspace& other) const {
        check_ambient(other);
        for (std::size_t i = 0; i < other.dim(); ++i)
            if (!contains_vector(other.rows_.row(i)))
                return false;
        return true;
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim())
            return false;
        return concat_rank(a, b) == a.dim();
    }

    /// rank of the concatenation [A | B] of the two bases.
    friend std::size_t concat_rank(const Subspace& a, const Subspace& b) {
        a.check_ambient(b);
        Matrix<F> residual(a.field(), 0, a.ambient_dim());
        for (std::size_t i = 0; i < b.dim(); ++i)
            residual.push_row(a.reduce(b.rows_.row(i)));
        return a.dim() + rank(std::move(residual));
    }

private:
    Subspace(Matrix<F> rows, std::vector<std::size_t> pivots) : rows_(std::move(rows)), pivots_(std::move(pivots)) {}

    void check_ambient(const Subspace& other) const {
        if (ambient_dim() != other.ambient_dim())
            throw DimensionMismatch("subspaces live in ambient spaces of different dimension (" +
                                    std::to_string(ambient_dim()) + " vs " + std::to_string(other.ambient_dim()) + ")");
    }

    Matrix<F> rows_;
    std::vector<std::size_t> pivots_;
};

/// Null space of `m` as a subspace of F^cols.
template <CoefficientField F>
Subspace<F> kernel_basis(const Matrix<F>& m) {
    using Scalar = typename F::Scalar;
    Matrix<F> r = m;
    const auto pivots = eliminate(r, true);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : pivots)
        is_pivot[c] = true;
    Matrix<F> generators(m.field(), 0, m.cols());
    std::vector<Scalar> x(m.cols(), m.field().zero());
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        std::fill(x.begin(), x.end(), m.field().zero());
        x[f] = m.field().one();
        for (std::size_t i = 0; i < pivots.size(); ++i)
            x[pivots[i]] = -r(i, f);
        generators.push_row(x);
    }
    return Subspace<F>::span_rows(std::move(generators));
}

/// Intersection, from the null space of [A | -B] projected onto the A block.
template <CoefficientField F>
Subspace<F> meet(const Subspace<F>& a, const Subspace<F>& b) {
    using Scalar = typename F::Scalar;
    if (a.ambient_dim() != b.ambient_dim())
        throw DimensionMismatch("meet of subspaces with different ambient dimension");
    const F& field = a.field();
    if (a.dim() == 0 || b.dim() == 0)
        return Subspace<F>::zero(field, a.ambient_dim());
    Matrix<F> system(field, a.ambient_dim(), a.dim() + b.dim());
    for (std::size_t k = 0; k < a.dim(); ++k)
        for (std::size_t i = 0; i < a.ambient_dim(); ++i)
            system(i, k) = a.basis_rows()(k, i);
    for (std::size_t k = 0; k < b.dim(); ++k)
        for (std::size_t i = 0; i < b.ambient_dim(); ++i)
            system(i, a.dim() + k) = -b.basis_rows()(k, i);
    const Subspace<F> solutions = kernel_basis(system);
    Matrix<F> generators(field, 0, a.ambient_dim());
    std::vector<Scalar> w(a.ambient_dim(), field.zero());
    for (std::size_t s = 0; s < solutions.dim(); ++s) {
        std::fill(w.begin(), w.end(), field.zero());
        const auto coeffs = solutions.basis_rows().row(s);
        for (std::size_t k = 0; k < a.dim(); ++k) {
            if (coeffs[k].is_zero())
                continue;
            const auto basis_vector = a.basis_rows().row(k);
            for (std::size_t i = 0; i < w.size(); ++i)
                if (!basis_vector[i].is_zero())
                    w[i] += coeffs[k] * basis_vector[i];
        }
        generators.push_row(w);
    }
    return Subspace<F>::span_rows(std::move(generators));
}

/// Sum of two subspaces.
template <CoefficientField F>
Subspace<F> join(const Subspace<F>& a, const Subspace<F>& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw DimensionMismatch("join of subspaces with different ambient dimension");
    Matrix<F> stacked(a.field(), 0, a.ambient_dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        stacked.push_row(a.basis_rows().row(i));
    for (std::size_t i = 0; i < b.dim(); ++i)
        stacked.push_row(b.basis_rows().row(i));
    return Subspace<F>::span_rows(std::move(stacked));
}

/// dim(a / b) for b contained in a.
template <CoefficientField F>
std::size_t quotient_dim(const Subspace<F>& a, const Subspace<F>& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw DimensionMismatch("quotient of subspaces with different ambient dimension");
    if (!a.contains(b))
        throw ContainmentViolation("quotient_dim: divisor is not contained in the dividend");
    return a.dim() - b.dim();
}

} // namespace mpers
