#include <catch_amalgamated.hpp>

#include <random>

#include <mpers/filtration.hpp>

#include <mpers/random.hpp>

using namespace mpers;
using Q = RationalField;

namespace {

MultiMetricSpace three_points() {
    // d1 = (d01, d02, d12) = (1, 2, 3), d2 = (3, 1, 2)
    return MultiMetricSpace(3, {{0, 1, 2, 1, 0, 3, 2, 3, 0}, {0, 3, 1, 3, 0, 2, 1, 2, 0}});
}

Point pt(std::initializer_list<Rational> xs) { return Point(xs); }

} // namespace

TEST_CASE("multi-metric spaces are validated") {
    CHECK_NOTHROW(three_points());
    CHECK_THROWS_AS(MultiMetricSpace(2, {{0, 1, 2, 0}}), PreconditionError);
    CHECK_THROWS_AS(MultiMetricSpace(2, {{1, 1, 1, 0}}), PreconditionError);
    CHECK_THROWS_AS(MultiMetricSpace(2, {{0, -1, -1, 0}}), PreconditionError);
    CHECK_THROWS_AS(MultiMetricSpace(2, {{0, 1, 1, 0}, {0, 1, 1}}), DimensionMismatch);
    CHECK_THROWS_AS(MultiMetricSpace(2, {}), PreconditionError);
}

TEST_CASE("Vietoris-Rips grades") {
    const auto two = MultiMetricSpace(2, {{0, 3, 3, 0}});
    const auto k2 = build_vietoris_rips(Q{}, two, 1);
    CHECK(k2.simplex(1, 0).grade == pt({3}));

    const auto k = build_vietoris_rips(Q{}, three_points(), 2);
    CHECK(k.size(0) == 3);
    CHECK(k.size(1) == 3);
    CHECK(k.size(2) == 1);
    CHECK(k.simplex(2, 0).grade == pt({3, 3}));
    CHECK(k.simplex(1, *k.index_of({0, 1})).grade == pt({1, 3}));
    for (int d = 0; d <= 2; ++d)
        for (const auto& s : k.simplices(d))
            if (d == 0)
                CHECK(s.grade == pt({0, 0}));
    CHECK(critical_grid(k).values() == std::vector<Rational>{0, 1, 2, 3});
}

TEST_CASE("faces enter no later than their cofaces") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10; ++t) {
        const auto space = random_space(rng, 5, 2);
        for (const auto& k : {build_vietoris_rips(Q{}, space, 2), build_cech(Q{}, space, 2)}) {
            for (int d = 1; d <= k.top_dim(); ++d)
                for (const auto& s : k.simplices(d))
                    for (std::size_t drop = 0; drop < s.vertices.size(); ++drop) {
                        auto face = s.vertices;
                        face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
                        CHECK(leq(k.simplex(d - 1, *k.index_of(face)).grade, s.grade));
                    }
            CHECK(boundary_squares_to_zero(k));
            CHECK(acyclic_below_top(k));
        }
    }
}

TEST_CASE("Cech grades use witnesses in the point set") {
    const auto two = MultiMetricSpace(2, {{0, 3, 3, 0}});
    const auto k2 = build_cech(Q{}, two, 1);
    CHECK(k2.simplex(0, 0).grade == pt({0}));
    CHECK(k2.simplex(1, 0).grade == pt({3}));
    const auto line = MultiMetricSpace(3, {{0, 2, 4, 2, 0, 2, 4, 2, 0}});
    const auto k3 = build_cech(Q{}, line, 1);
    CHECK(k3.simplex(1, *k3.index_of({0, 2})).grade == pt({2}));
}

TEST_CASE("critical grid") {
    const auto single = build_vietoris_rips(Q{}, MultiMetricSpace(1, {{0}}), 1);
    CHECK(critical_grid(single).values() == std::vector<Rational>{0});
    CHECK(single.size(0) == 1);
    const Grid g({Rational(3), Rational(0), Rational(1), Rational(1)}, 2);
    CHECK(g.values() == std::vector<Rational>{0, 1, 3});
    CHECK(g.on_gridlines(pt({Rational(1, 2), 3})));
    CHECK_FALSE(g.on_gridlines(pt({Rational(1, 2), 2})));
    CHECK(g.floor_index(Rational(2)) == 1);
    CHECK(g.floor_index(Rational(-1)) == -1);
    CHECK(*g.injectivity_radius() == Rational(1, 2));
    CHECK_THROWS_AS(Grid({}, 1), PreconditionError);
}

TEST_CASE("graded complexes reject malformed input") {
    using V = std::vector<std::uint32_t>;
    const auto simplex = [](V v, Point g) { return Simplex{std::move(v), std::move(g)}; };
    // missing face
    CHECK_THROWS_AS(GradedComplex<Q>(Q{}, 1, {simplex({0}, {0}), simplex({0, 1}, {1})}), PreconditionError);
    // face enters after the coface
    CHECK_THROWS_AS(GradedComplex<Q>(Q{}, 1, {simplex({0}, {2}), simplex({1}, {0}), simplex({0, 1}, {1})}),
                    PreconditionError);
    // multi-critical: the same simplex twice
    CHECK_THROWS_AS(GradedComplex<Q>(Q{}, 1, {simplex({0}, {0}), simplex({0}, {1})}), PreconditionError);
    // wrong number of grade coordinates
    CHECK_THROWS_AS(GradedComplex<Q>(Q{}, 2, {simplex({0}, {0})}), DimensionMismatch);
    CHECK_THROWS_AS(GradedComplex<Q>(Q{}, 1, {simplex({0, 0}, {0})}), PreconditionError);
}

TEST_CASE("chain, cycle and boundary spaces") {
    const auto k = build_vietoris_rips(Q{}, three_points(), 2);
    // only vertices at the origin
    CHECK(chain_space(k, 0, pt({0, 0})).dim() == 3);
    CHECK(chain_space(k, 1, pt({0, 0})).dim() == 0);
    CHECK(cycles(k, 0, pt({0, 0})).dim() == 2);
    CHECK(chain_space(k, -1, pt({0, 0})).dim() == 1);
    // edges 02 and 12 only, then everything
    CHECK(cycles(k, 1, pt({3, 2})).dim() == 0);
    CHECK(cycles(k, 1, pt({3, 3})).dim() == 1);
    CHECK(boundaries(k, 1, pt({3, 2})).dim() == 0);
    CHECK(boundaries(k, 1, pt({3, 3})).dim() == 1);
    CHECK(boundaries(k, 0, pt({-1, -1})).dim() == 0);
    // acyclic at the top
    const Point top = critical_grid(k).top();
    for (int d = 0; d < k.top_dim(); ++d)
        CHECK(cycles(k, d, top) == boundaries(k, d, top));
}

TEST_CASE("spaces are monotone and depend only on the grid cell") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        const auto space = random_space(rng, 5, 2);
        const auto k = build_vietoris_rips(Q{}, space, 2);
        const Grid grid = critical_grid(k);
        for (int q = 0; q < 10; ++q) {
            const Point u = random_point(rng, grid, 2);
            Point v = u;
            v[0] += random_offset(rng);
            v[1] += random_offset(rng);
            Point rounded(2);
            for (std::size_t i = 0; i < 2; ++i) {
                const int idx = grid.floor_index(u[i]);
                rounded[i] = idx < 0 ? u[i] : grid.values()[static_cast<std::size_t>(idx)];
            }
            for (int d = 0; d <= 1; ++d) {
                const auto zu = cycles(k, d, u), zv = cycles(k, d, v);
                const auto bu = boundaries(k, d, u), bv = boundaries(k, d, v);
                CHECK(zv.contains(zu));
                CHECK(bv.contains(bu));
                CHECK(zu.contains(bu));
                CHECK(chain_space(k, d, v).contains(chain_space(k, d, u)));
                CHECK(zu == cycles(k, d, rounded));
                CHECK(bu == boundaries(k, d, rounded));
                CHECK(chain_space(k, d, u) == chain_space(k, d, rounded));
            }
        }
    }
}

TEST_CASE("corrupted boundaries are detected") {
    auto k = build_vietoris_rips(Q{}, three_points(), 2);
    REQUIRE(boundary_squares_to_zero(k));
    auto broken = k.boundary(1);
    auto col = broken.column(0);
    col.front().second = col.front().second + Rational(1);
    broken.set_column(0, col);
    k.unchecked_replace_boundary(1, broken);
    CHECK_FALSE(boundary_squares_to_zero(k));
}
