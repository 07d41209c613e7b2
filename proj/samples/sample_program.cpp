// Builds a Vietoris-Rips bifiltration of four points, prints its degree-1
// diagram on one pair of diagonal lines, and compares it with a perturbed copy.

#include <iostream>

#include <mpers/mpers.hpp>

using mpers::Rational;

int main() {
    // row-major 4 x 4 distance matrices
    const std::vector<Rational> d1 = {0, 1, 2, 1, 1, 0, 1, 2, 2, 1, 0, 1, 1, 2, 1, 0};
    const std::vector<Rational> d2 = {0, 2, 3, 1, 2, 0, 1, 3, 3, 1, 0, 2, 1, 3, 2, 0};
    const mpers::MultiMetricSpace space(4, {d1, d2});
    const auto f = mpers::build_vietoris_rips(mpers::RationalField{}, space, 2);

    // the same points with the second metric moved by at most 1/2
    auto d2p = d2;
    d2p[2] = d2p[8] = Rational(5, 2);
    const auto g = mpers::build_vietoris_rips(mpers::RationalField{}, mpers::MultiMetricSpace(4, {d1, d2p}), 2);

    const mpers::RankFunction rf(f), rg(g);
    const mpers::Point u0{0, 1}, v0{0, 0};
    mpers::Diagram x(2, "Q"), y(2, "Q");
    for (const auto& [bar, mass] : mpers::support_on_lines(rf, 1, u0, v0, mpers::critical_grid(f)))
        x.add(bar, mass);
    for (const auto& [bar, mass] : mpers::support_on_lines(rg, 1, u0, v0, mpers::critical_grid(g)))
        y.add(bar, mass);

    std::cout << "degree-1 diagram of F on the lines through " << mpers::to_string(u0) << " and "
              << mpers::to_string(v0) << ":\n";
    for (const auto& [bar, e] : x.entries())
        std::cout << "  " << mpers::to_string(bar) << "  mass " << e.mass << '\n';

    const auto eps = mpers::shift_interleaving_bound(f, g).epsilon;
    const auto result = mpers::bottleneck(x, y);
    std::cout << "shift interleaving bound " << eps << ", bottleneck on these lines "
              << (result.norm ? result.norm->to_string() : "inf") << '\n';
    return result.norm && *result.norm <= eps ? 0 : 1;
}
