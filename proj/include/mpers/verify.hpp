#pragma once

// Randomised property suite behind the `verify` command. Each property keeps
// a count of checks and the first counterexample.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diagram.hpp"
#include "distances.hpp"
#include "filtration.hpp"
#include "oracles.hpp"
#include "random.hpp"

namespace mpers {

struct PropertyReport {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string counterexample;

    bool passed() const { return failures == 0; }
};

class PropertySuite {
public:
    /// Records one check of `name`; `detail` is evaluated only on failure.
    void check(const std::string& name, bool ok, const std::function<std::string()>& detail = {}) {
        auto& r = reports_[name];
        r.name = name;
        ++r.checks;
        if (!ok) {
            ++r.failures;
            if (r.counterexample.empty())
                r.counterexample = detail ? detail() : std::string("(no detail)");
        }
    }

    std::vector<PropertyReport> reports() const {
        std::vector<PropertyReport> out;
        for (const auto& [name, r] : reports_)
            out.push_back(r);
        return out;
    }

    bool all_passed() const {
        for (const auto& [name, r] : reports_)
            if (!r.passed())
                return false;
        return true;
    }

private:
    std::map<std::string, PropertyReport> reports_;
};

/// Single-complex properties: chain complex laws, inversion identity,
/// positivity, closed form, box formula and grid-refinement invariance at
/// `queries` random bars.
template <CoefficientField F, class Rng>
void check_complex(PropertySuite& suite, const GradedComplex<F>& k, Rng& rng, int queries, int max_d = 1) {
    const Grid grid = critical_grid(k);
    const std::size_t n = k.n_params();
    suite.check("boundary of boundary is zero", boundary_squares_to_zero(k));
    suite.check("acyclic at the top", acyclic_below_top(k));
    const RankFunction<F> rf(k);

    std::vector<Rational> extra;
    for (int tries = 0; extra.size() < 3 && tries < 100; ++tries) {
        const Rational x = random_point(rng, grid, 1)[0] + Rational(1, 7);
        if (!grid.contains_value(x) && std::find(extra.begin(), extra.end(), x) == extra.end())
            extra.push_back(x);
    }
    const Grid fine = grid.refined(extra);

    for (int q = 0; q < queries; ++q) {
        auto [u, v] = random_bar_endpoints(rng, grid, n);
        const Bar bar{u, v};
        for (int d = 0; d <= std::min(max_d, k.top_dim() - 1); ++d) {
            const auto where = [&] { return "d=" + std::to_string(d) + " bar " + to_string(bar); };
            suite.check("boundaries are cycles", rf.cycles(d, rf.cell(u)).contains(rf.boundaries(d, rf.cell(u))), where);

            std::int64_t sum = 0;
            for (const Bar& j : bars_below(bar, grid)) {
                const std::int64_t m = mobius_inversion_at(rf, d, j, grid);
                sum += m;
                const auto at_j = [&] { return "d=" + std::to_string(d) + " bar " + to_string(j); };
                suite.check("positivity", m >= 0, [&] { return at_j() + " value " + std::to_string(m); });
                suite.check("closed form equals Moebius inversion",
                            m == static_cast<std::int64_t>(closed_form_at(rf, d, j, grid)), at_j);
                suite.check("grid refinement invariance", m == mobius_inversion_at(rf, d, j, fine), at_j);
            }
            const auto r = static_cast<std::int64_t>(rf.rank(d, bar));
            suite.check("inversion identity", sum == r, [&] {
                return where() + " sum " + std::to_string(sum) + " rank " + std::to_string(r);
            });

            const Rational rad = radius(bar);
            if (rad.sign() > 0) {
                const Rational box_r = rad * Rational(static_cast<int>(rng() % 4), 4);
                const BoxSum b = box_sum(rf, d, bar, box_r, grid);
                const std::int64_t direct = box_support_sum(rf, d, bar, box_r + b.delta, grid);
                suite.check("box formula", b.value == direct && b.value == static_cast<std::int64_t>(b.quotient), [&] {
                    return where() + " r=" + box_r.to_string() + " corners " + std::to_string(b.value) +
                           " enumerated " + std::to_string(direct) + " quotient " + std::to_string(b.quotient);
                });
            }
        }
    }
}

/// One-parameter check against the classical reduction.
template <CoefficientField F>
void check_one_parameter(PropertySuite& suite, const GradedComplex<F>& k, int max_d = 1) {
    const Grid grid = critical_grid(k);
    const RankFunction<F> rf(k);
    const Bar window{Point{grid.min()}, Point{grid.max()}};
    for (int d = 0; d <= std::min(max_d, k.top_dim() - 1); ++d) {
        const Diagram dgm = support_in_window(rf, d, window, grid);
        std::map<Bar, std::int64_t> got;
        for (const auto& [b, e] : dgm.entries())
            got[b] = e.mass;
        const auto expected = classical_persistence(k, d);
        suite.check("one-parameter diagram equals classical barcode", got == expected, [&] {
            std::ostringstream os;
            os << "d=" << d << " support has " << got.size() << " bars, reduction has " << expected.size();
            return os.str();
        });
    }
}

/// Diagrams of f and g on the same diagonal line pairs, compared by the
/// bottleneck distance against the shift bound eps.
template <CoefficientField F, class Rng>
void check_stability(PropertySuite& suite, const GradedComplex<F>& f, const GradedComplex<F>& g, Rng& rng,
                     int queries, int line_pairs, int max_d = 1) {
    const InterleavingWitness w = shift_interleaving_bound(f, g);
    suite.check("shift witness inequalities", w.valid());
    const Rational eps = w.epsilon;
    const RankFunction<F> rf(f), rg(g);
    const Grid gf = critical_grid(f), gg = critical_grid(g);
    const std::size_t n = f.n_params();

    for (int q = 0; q < queries; ++q) {
        auto [u, v] = random_bar_endpoints(rng, gf, n);
        for (auto& x : v)
            x += eps * 2 + 1;
        const Bar bar{u, v};
        const Rational rad = radius(bar);
        const Rational r = (rad - eps) * Rational(static_cast<int>(rng() % 4), 4);
        for (int d = 0; d <= std::min(max_d, f.top_dim() - 1); ++d) {
            const BoxStability s = box_stability_check(rf, rg, d, bar, r, eps);
            suite.check("box stability", s.holds, [&] {
                return "d=" + std::to_string(d) + " bar " + to_string(bar) + " r=" + r.to_string() +
                       " eps=" + eps.to_string() + " lhs " + std::to_string(s.lhs) + " rhs " + std::to_string(s.rhs);
            });
        }
    }

    // line pairs through random grid points of either complex
    const bool easy = easy_bijection_applies(gf, eps);
    for (int p = 0; p < line_pairs; ++p) {
        const Grid& from = (p % 2 == 0) ? gf : gg;
        const Point u0 = random_point(rng, from, n);
        Point v0 = random_point(rng, from, n);
        for (int d = 0; d <= std::min(max_d, f.top_dim() - 1); ++d) {
            Diagram x(n, f.field().name()), y(n, g.field().name());
            for (const auto& [b, m] : support_on_lines(rf, d, u0, v0, gf))
                x.add(b, m);
            for (const auto& [b, m] : support_on_lines(rg, d, u0, v0, gg))
                y.add(b, m);
            const BottleneckResult res = bottleneck(x, y);
            const bool ok = res.norm && *res.norm <= eps && is_valid_matching(res.matching, x, y);
            const auto where = [&] {
                return "d=" + std::to_string(d) + " lines through " + to_string(u0) + " and " + to_string(v0) +
                       " bottleneck " + (res.norm ? res.norm->to_string() : std::string("inf")) +
                       " eps=" + eps.to_string();
            };
            suite.check("bottleneck stability on line pairs", ok, where);
            if (easy)
                suite.check("easy bijection", ok, where);
        }
    }

    // interpolation endpoints and Lipschitz drift
    const Rational t = Rational(static_cast<int>(rng() % 5), 4);
    const Rational s = Rational(static_cast<int>(rng() % 5), 4);
    const auto k0 = interpolate(f, g, eps, Rational(0));
    const auto k1 = interpolate(f, g, eps, Rational(1));
    suite.check("interpolation endpoints", k0 == f && k1 == g);
    const auto kt = interpolate(f, g, eps, t), ks = interpolate(f, g, eps, s);
    suite.check("interpolation is eps-Lipschitz", shift_interleaving_bound(kt, ks).epsilon <= eps * (t - s).abs(),
                [&] { return "t=" + t.to_string() + " s=" + s.to_string(); });
}

struct VerifyOptions {
    std::uint64_t seed = 1;
    int trials = 5;
    std::size_t points = 6;
    int queries = 10;
    int line_pairs = 6;
    Rational epsilon = Rational(1, 2);
};

/// The full randomised suite on Vietoris-Rips bifiltrations, perturbed pairs
/// and one-parameter filtrations over Q.
inline PropertySuite run_random_suite(const VerifyOptions& opt) {
    PropertySuite suite;
    std::mt19937_64 rng(opt.seed);
    for (int t = 0; t < opt.trials; ++t) {
        const MultiMetricSpace space = random_space(rng, opt.points, 2);
        const auto f = build_vietoris_rips(RationalField{}, space, 2);
        check_complex(suite, f, rng, opt.queries);
        const auto g = build_vietoris_rips(RationalField{}, perturb(rng, space, opt.epsilon), 2);
        check_stability(suite, f, g, rng, opt.queries, opt.line_pairs);

        const auto line = build_vietoris_rips(RationalField{}, random_space(rng, opt.points + 2, 1), 2);
        check_one_parameter(suite, line);
        const auto line_mod = build_vietoris_rips(PrimeField(2), random_space(rng, opt.points + 2, 1), 2);
        check_one_parameter(suite, line_mod);
    }
    return suite;
}

} // namespace mpers
