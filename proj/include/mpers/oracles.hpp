#pragma once

// Classical one-parameter persistence by the standard column reduction of
// the filtered boundary matrix. Used as ground truth for n = 1 diagrams; it
// shares no code with the rank-function machinery.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "diagram.hpp"
#include "errors.hpp"
#include "exactnum.hpp"
#include "filtration.hpp"

namespace mpers {

/// Multiset of finite (birth, death) pairs in dimension d, including pairs of
/// length zero, as a map bar -> multiplicity.
template <CoefficientField F>
std::map<Bar, std::int64_t> classical_persistence(const GradedComplex<F>& complex, int d) {
    if (complex.n_params() != 1)
        throw PreconditionError("classical persistence needs a 1-parameter filtration");
    const F& field = complex.field();
    using Scalar = typename F::Scalar;

    struct Cell {
        int dim;
        Rational grade;
        std::vector<std::uint32_t> vertices;
    };
    std::vector<Cell> cells{{-1, Rational(0), {}}};
    for (int k = 0; k <= complex.top_dim(); ++k)
        for (const auto& s : complex.simplices(k))
            cells.push_back({k, s.grade[0], s.vertices});
    // the empty simplex sits below every grade
    Rational lowest = 0;
    for (const auto& c : cells)
        lowest = mpers::min(lowest, c.grade);
    cells[0].grade = lowest - 1;
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.grade != b.grade)
            return a.grade < b.grade;
        if (a.dim != b.dim)
            return a.dim < b.dim;
        return a.vertices < b.vertices;
    });
    std::map<std::vector<std::uint32_t>, std::size_t> position;
    for (std::size_t i = 0; i < cells.size(); ++i)
        position[cells[i].vertices] = i;

    // columns as sparse maps row -> coefficient
    std::vector<std::map<std::size_t, Scalar>> columns(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
        const auto& v = cells[j].vertices;
        for (std::size_t k = 0; k < v.size(); ++k) {
            std::vector<std::uint32_t> face;
            for (std::size_t m = 0; m < v.size(); ++m)
                if (m != k)
                    face.push_back(v[m]);
            columns[j][position.at(face)] = (k % 2 == 0) ? field.one() : -field.one();
        }
    }

    std::map<Bar, std::int64_t> pairs;
    std::map<std::size_t, std::size_t> column_with_low;
    for (std::size_t j = 0; j < cells.size(); ++j) {
        auto& col = columns[j];
        while (!col.empty()) {
            const std::size_t low = col.rbegin()->first;
            const auto it = column_with_low.find(low);
            if (it == column_with_low.end())
                break;
            const auto& other = columns[it->second];
            const Scalar factor = col.rbegin()->second * other.rbegin()->second.inverse();
            for (const auto& [row, value] : other) {
                Scalar updated = col.count(row) ? col[row] - factor * value : -(factor * value);
                if (updated.is_zero())
                    col.erase(row);
                else
                    col[row] = updated;
            }
        }
        if (col.empty())
            continue;
        const std::size_t low = col.rbegin()->first;
        column_with_low[low] = j;
        if (cells[low].dim == d)
            ++pairs[Bar{Point{cells[low].grade}, Point{cells[j].grade}}];
    }
    return pairs;
}

} // namespace mpers
