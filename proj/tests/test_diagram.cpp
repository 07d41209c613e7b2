#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <random>

#include <mpers/diagram.hpp>
#include <mpers/oracles.hpp>
#include <mpers/random.hpp>

#include "rank_oracle.hpp"

using namespace mpers;
using Q = RationalField;

namespace {

Point pt(std::initializer_list<Rational> xs) { return Point(xs); }
Bar bar(std::initializer_list<Rational> u, std::initializer_list<Rational> v) { return {Point(u), Point(v)}; }

// 2-simplex: the 1-cycle is born at (1,1) and filled at (3,2)
GradedComplex<Q> triangle() {
    return GradedComplex<Q>(Q{}, 2,
                            {{{0}, pt({0, 0})},
                             {{1}, pt({0, 0})},
                             {{2}, pt({0, 0})},
                             {{0, 1}, pt({1, 0})},
                             {{1, 2}, pt({0, 1})},
                             {{0, 2}, pt({1, 1})},
                             {{0, 1, 2}, pt({3, 2})}});
}

// two vertices at the origin joined by an edge at (2,1)
GradedComplex<Q> late_edge() {
    return GradedComplex<Q>(Q{}, 2, {{{0}, pt({0, 0})}, {{1}, pt({0, 0})}, {{0, 1}, pt({2, 1})}});
}

std::int64_t sum_below(const RankFunction<Q>& rf, int d, const Bar& k, const Grid& grid) {
    std::int64_t s = 0;
    for (const Bar& j : bars_below(k, grid))
        s += mobius_inversion_at(rf, d, j, grid);
    return s;
}

} // namespace

TEST_CASE("bar order moves both endpoints along the diagonal") {
    const Bar a = bar({0, 0}, {2, 2});
    CHECK(bar_leq(a, a));
    CHECK(bar_leq(a, bar({1, 1}, {3, 3})));
    CHECK_FALSE(bar_leq(a, bar({1, 0}, {3, 3})));
    CHECK_FALSE(bar_leq(bar({1, 0}, {3, 3}), a));
    CHECK_FALSE(bar_leq(bar({1, 1}, {3, 3}), a));
    CHECK_THROWS_AS(make_bar(pt({1, 0}), pt({0, 1})), PreconditionError);
}

TEST_CASE("previous gridline point") {
    const Grid s({0, 1, 3}, 2);
    CHECK(prev_on_gridlines(pt({1, 2}), s) == pt({0, 1}));
    CHECK_FALSE(prev_on_gridlines(pt({0, 0}), Grid({0}, 2)));
    CHECK_FALSE(prev_on_gridlines(pt({1, 5}), Grid({0, 1}, 2), pt({1, Rational(9, 2)})));
    CHECK(next_on_gridlines(pt({1, 2}), s) == pt({2, 3}));
    CHECK(gridline_hits(pt({0, 0}), s) == std::vector<Rational>{0, 1, 3});
}

TEST_CASE("covers in the bar poset") {
    const Grid s({0, 1, 3}, 2);
    const Covers c = covers_below(bar({1, 1}, {3, 3}), s);
    REQUIRE(c.j1);
    REQUIRE(c.j2);
    REQUIRE(c.j3);
    CHECK(*c.j1 == bar({0, 0}, {3, 3}));
    CHECK(*c.j2 == bar({1, 1}, {1, 1}));
    CHECK(*c.j3 == bar({0, 0}, {1, 1}));

    const Covers minimal = covers_below(bar({0, 0}, {0, 0}), s);
    CHECK(minimal.covered().empty());
    CHECK_FALSE(minimal.j3);

    // radius zero: nothing below v on its diagonal is above u
    const Covers tight = covers_below(bar({1, 0}, {3, 0}), s);
    CHECK(tight.j1);
    CHECK_FALSE(tight.j2);
    CHECK_FALSE(tight.j3);
}

TEST_CASE("the upper diagonal has vertices where a lower gridline hit reaches radius zero") {
    const Grid s({0, 1, 2}, 2);
    // u = (0, 3/2) is on the gridline x = 0; the first point of the diagonal
    // through (3,2) above it is (5/2, 3/2), which is on no gridline
    const Bar tight = bar({0, Rational(3, 2)}, {Rational(5, 2), Rational(3, 2)});
    CHECK(radius(tight) == 0);
    CHECK_FALSE(s.on_gridlines(tight.v));
    CHECK(in_dgm(tight, s));
    const auto offsets = upper_offsets(bar({0, Rational(3, 2)}, {3, 2}), s);
    CHECK(std::find(offsets.begin(), offsets.end(), Rational(-1, 2)) != offsets.end());

    const auto k = late_edge();
    const RankFunction rf(k);
    const Grid grid = critical_grid(k);
    REQUIRE(grid == s);
    CHECK(mobius_inversion_at(rf, 0, tight, grid) == 1);
    CHECK(closed_form_at(rf, 0, tight, grid) == 1);
    // the gridline bar above it carries nothing
    CHECK(mobius_inversion_at(rf, 0, bar({0, Rational(3, 2)}, {3, 2}), grid) == 0);
    // and the inversion identity holds at a bar strictly between them
    const Bar between = bar({0, Rational(3, 2)}, {Rational(11, 4), Rational(7, 4)});
    CHECK(rf.rank(0, between) == 1);
    CHECK(sum_below(rf, 0, between, grid) == 1);
}

TEST_CASE("rank agrees with an independent oracle") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 8; ++t) {
        const auto k = build_vietoris_rips(Q{}, random_space(rng, 5, 2), 2);
        const RankFunction rf(k);
        const Grid grid = critical_grid(k);
        for (int q = 0; q < 30; ++q) {
            auto [u, v] = random_bar_endpoints(rng, grid, 2);
            for (int d = 0; d <= 1; ++d)
                CHECK(rf.rank(d, Bar{u, v}) == oracle::rank(k, d, u, v));
        }
    }
}

TEST_CASE("rank edge cases") {
    const auto k = triangle();
    const RankFunction rf(k);
    CHECK(rank(rf, 1, bar({-1, -1}, {5, 5})) == 0);
    // v at the top: every cycle present at u has died
    CHECK(rank(rf, 1, bar({1, 1}, {3, 3})) == rf.cycles(1, rf.cell(pt({1, 1}))).dim());
    CHECK(rank(rf, 0, bar({0, 0}, {3, 3})) == 2);
    CHECK(rank(rf, 1, bar({1, 1}, {3, 2})) == 1);
    CHECK(rank(rf, 1, bar({1, 1}, {3, 1})) == 0);
    CHECK_THROWS_AS(rank(rf, 1, bar({1, 1}, {0, 3})), PreconditionError);
    CHECK_THROWS_AS(rf.rank(0, Bar{pt({0}), pt({1})}), DimensionMismatch);

    std::mt19937_64 rng(5);
    const auto vr = build_vietoris_rips(Q{}, random_space(rng, 5, 2), 2);
    const RankFunction rv(vr);
    const Grid grid = critical_grid(vr);
    for (int q = 0; q < 50; ++q) {
        auto [u, v] = random_bar_endpoints(rng, grid, 2);
        const Rational a = random_offset(rng), b = random_offset(rng);
        const Bar lo{u, v}, hi{shifted(u, a), shifted(v, b)};
        for (int d = 0; d <= 1; ++d)
            CHECK(rv.rank(d, lo) <= rv.rank(d, hi));
    }
}

TEST_CASE("Moebius inversion cases") {
    const auto k = triangle();
    const RankFunction rf(k);
    const Grid grid = critical_grid(k);

    // minimal bar: value is the rank itself
    const Bar bottom = bar({0, 0}, {0, 0});
    CHECK(covers_below(bottom, grid).covered().empty());
    CHECK(mobius_inversion_at(rf, 0, bottom, grid) == static_cast<std::int64_t>(rf.rank(0, bottom)));
    CHECK(closed_form_at(rf, 0, bottom, grid) == rf.birth_death(0, bottom).dim());

    // the 1-cycle is born on the boundary of the quadrant at (1,1) and dies
    // on the boundary of the quadrant at (3,2)
    const Rational h = Rational(1, 2);
    CHECK(mobius_inversion_at(rf, 1, bar({1, 1}, {3, 2}), grid) == 1);
    CHECK(mobius_inversion_at(rf, 1, bar({1, 1 + h}, {3, 2 + h}), grid) == 1);
    CHECK(mobius_inversion_at(rf, 1, bar({1 + h, 1}, {3 + h, 2}), grid) == 1);
    CHECK(mobius_inversion_at(rf, 1, bar({1, 2}, {3, 3}), grid) == 1);
    CHECK(mobius_inversion_at(rf, 1, bar({2, 1}, {4, 2}), grid) == 1);
    CHECK(mobius_inversion_at(rf, 1, bar({1, 1}, {4, 2}), grid) == 1);
    CHECK(mobius_inversion_at(rf, 1, bar({1, 1}, {3, 3}), grid) == 1);
    CHECK(mobius_inversion_at(rf, 1, bar({1, 1}, {4, 3}), grid) == 0);
    CHECK(mobius_inversion_at(rf, 1, bar({2, 2}, {3, 3}), grid) == 0);
    CHECK(mobius_inversion_at(rf, 1, bar({0, 1}, {3, 2}), grid) == 0);

    // off the poset: extension by zero
    const Bar off = bar({h + h / 2, h}, {3 + h / 2, 3});
    CHECK_FALSE(in_dgm(off, grid));
    CHECK(mobius_inversion_at(rf, 1, off, grid) == 0);
    CHECK(closed_form_at(rf, 1, off, grid) == 0);

    // BD(K) = BD(J1) gives zero
    const Bar same = bar({2, 2}, {3, 3});
    REQUIRE(covers_below(same, grid).j1);
    CHECK(rf.birth_death(1, same) == rf.birth_death(1, *covers_below(same, grid).j1));
    CHECK(closed_form_at(rf, 1, same, grid) == 0);
}

TEST_CASE("Moebius inversion properties on random bifiltrations") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 6; ++t) {
        const auto k = build_vietoris_rips(Q{}, random_space(rng, 5, 2), 2);
        const RankFunction rf(k);
        const Grid grid = critical_grid(k);
        for (int q = 0; q < 8; ++q) {
            auto [u, v] = random_bar_endpoints(rng, grid, 2);
            const Bar kbar{u, v};
            for (int d = 0; d <= 1; ++d) {
                std::int64_t sum = 0;
                for (const Bar& j : bars_below(kbar, grid)) {
                    const auto m = mobius_inversion_at(rf, d, j, grid);
                    CHECK(m >= 0);
                    CHECK(m == static_cast<std::int64_t>(closed_form_at(rf, d, j, grid)));
                    const Covers c = covers_below(j, grid);
                    if (c.j1 && !c.j2)
                        CHECK(m == static_cast<std::int64_t>(rf.rank(d, j)) -
                                       static_cast<std::int64_t>(rf.rank(d, *c.j1)));
                    sum += m;
                }
                CHECK(sum == static_cast<std::int64_t>(rf.rank(d, kbar)));
            }
        }
    }
}

TEST_CASE("box formula") {
    const auto k = triangle();
    const RankFunction rf(k);
    const Grid grid = critical_grid(k);

    const Bar center = bar({1, 1}, {3, 2});
    const BoxSum b = box_sum(rf, 1, center, Rational(1, 4), grid);
    CHECK(b.value == 1);
    CHECK(b.quotient == 1);
    CHECK(b.delta > 0);
    CHECK(box_support_sum(rf, 1, center, Rational(1, 4) + b.delta, grid) == 1);

    // a box away from all support
    const Bar empty = bar({-3, -3}, {-1, -1});
    CHECK(box_sum(rf, 1, empty, Rational(1, 2), grid).value == 0);

    CHECK_THROWS_AS(box_sum(rf, 1, center, Rational(1, 2), grid), PreconditionError);
    CHECK_THROWS_AS(box_sum(rf, 1, center, Rational(-1, 4), grid), PreconditionError);
    CHECK_THROWS_AS(box_sum(rf, 1, center, Rational(0), grid, Rational(0)), PreconditionError);
    // a requested delta above the default is shrunk
    CHECK(box_sum(rf, 1, center, Rational(0), grid, Rational(100)).delta == default_box_delta(center, 0, grid));

    std::mt19937_64 rng(3);
    for (int t = 0; t < 6; ++t) {
        const auto vr = build_vietoris_rips(Q{}, random_space(rng, 5, 2), 2);
        const RankFunction rv(vr);
        const Grid g = critical_grid(vr);
        for (int q = 0; q < 10; ++q) {
            auto [u, v] = random_bar_endpoints(rng, g, 2);
            const Bar i{u, v};
            if (radius(i) == 0)
                continue;
            const Rational r = radius(i) * Rational(static_cast<int>(rng() % 4), 4);
            for (int d = 0; d <= 1; ++d) {
                const BoxSum s = box_sum(rv, d, i, r, g);
                CHECK(s.value == box_support_sum(rv, d, i, r + s.delta, g));
                CHECK(s.value == static_cast<std::int64_t>(s.quotient));
            }
        }
    }
}

TEST_CASE("diagram container") {
    Diagram d(2, "Q");
    d.add(bar({0, 0}, {1, 1}), 2);
    d.add(bar({0, 0}, {1, 1}), 1);
    d.add(bar({0, 0}, {2, 2}), 0);
    CHECK(d.size() == 1);
    CHECK(d.mass(bar({0, 0}, {1, 1})) == 3);
    CHECK(d.total_mass() == 3);
    CHECK_THROWS_AS(d.add(bar({0, 0}, {1, 1}), -1), PreconditionError);
    CHECK_THROWS_AS(d.add(Bar{pt({0}), pt({1})}, 1), DimensionMismatch);
    CHECK_THROWS_AS(d.add(bar({1, 1}, {0, 2}), 1), PreconditionError);
}

TEST_CASE("one-parameter support equals the classical barcode") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        const auto k = build_vietoris_rips(Q{}, random_space(rng, 7, 1), 2);
        const RankFunction rf(k);
        const Grid grid = critical_grid(k);
        const Bar window{pt({grid.min()}), pt({grid.max()})};
        for (int d = 0; d <= 1; ++d) {
            std::map<Bar, std::int64_t> got;
            const Diagram dgm = support_in_window(rf, d, window, grid);
            for (const auto& [b, e] : dgm.entries())
                got[b] = e.mass;
            CHECK(got == classical_persistence(k, d));
        }
    }
}

TEST_CASE("two-parameter support") {
    const auto k = triangle();
    const RankFunction rf(k);
    const Grid grid = critical_grid(k);
    const Bar window = bar({0, 0}, {3, 3});
    const Diagram dgm = support_in_window(rf, 1, window, grid);
    REQUIRE_FALSE(dgm.empty());
    for (const auto& [b, e] : dgm.entries()) {
        CHECK(e.mass > 0);
        CHECK(e.mass == mobius_inversion_at(rf, 1, b, grid));
        CHECK(leq(window.u, b.u));
        CHECK(leq(b.v, window.v));
        REQUIRE(e.stratum);
        CHECK(b.u[1] - b.u[0] >= e.stratum->u_offset.lo.value_or(b.u[1] - b.u[0]));
    }
    CHECK(dgm.mass(bar({1, 1}, {3, 2})) == 1);

    std::mt19937_64 rng(2);
    const auto vr = build_vietoris_rips(Q{}, random_space(rng, 5, 2), 2);
    const RankFunction rv(vr);
    const Grid g = critical_grid(vr);
    const Bar w{constant_point(2, g.min()), constant_point(2, g.max())};
    const Diagram all = support_in_window(rv, 1, w, g);
    for (const auto& [b, e] : all.entries())
        CHECK(e.mass == mobius_inversion_at(rv, 1, b, g));

    CHECK_THROWS_AS(support_in_window(rf, 1, Bar{pt({0}), pt({1})}, grid), DimensionMismatch);
    CHECK_THROWS_AS(support_in_window(rf, 1, bar({2, 2}, {1, 1}), grid), PreconditionError);

    const auto k3 = GradedComplex<Q>(Q{}, 3, {{{0}, pt({0, 0, 0})}});
    const RankFunction r3(k3);
    CHECK_THROWS_AS(support_in_window(r3, 0, bar({0, 0, 0}, {1, 1, 1}), critical_grid(k3)), UnsupportedDimension);
}

TEST_CASE("support of a complex without cycles is empty") {
    const auto k = GradedComplex<Q>(Q{}, 1, {{{0}, pt({0})}});
    const RankFunction rf(k);
    const Grid grid = critical_grid(k);
    for (int d = 0; d <= 1; ++d)
        CHECK(support_in_window(rf, d, Bar{pt({-1}), pt({1})}, grid).empty());
}

TEST_CASE("support enumeration does not depend on the thread count") {
    std::mt19937_64 rng(9);
    const auto k = build_vietoris_rips(Q{}, random_space(rng, 5, 2), 2);
    const Grid grid = critical_grid(k);
    const Bar w{constant_point(2, grid.min()), constant_point(2, grid.max())};
    ::setenv("MPERS_THREADS", "1", 1);
    const Diagram one = support_in_window(RankFunction(k), 1, w, grid);
    ::setenv("MPERS_THREADS", "4", 1);
    const Diagram four = support_in_window(RankFunction(k), 1, w, grid);
    ::unsetenv("MPERS_THREADS");
    CHECK(one == four);
    CHECK(one.entries().size() == four.entries().size());
}
