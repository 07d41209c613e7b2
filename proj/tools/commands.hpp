#pragma once

// The five subcommands of the mpers tool. Each writes its result to `out` and
// throws mpers errors; mapping errors to exit codes happens in main.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <mpers/io.hpp>
#include <mpers/mpers.hpp>
#include <mpers/verify.hpp>

namespace mpers::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_precondition = 2, exit_verify = 3 };

/// "a1,...,an:b1,...,bn" -> the bar (a, b).
inline Bar parse_bar_text(std::string_view text, std::size_t n) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || text.find(':', colon + 1) != std::string_view::npos)
        throw ParseError("expected 'u1,...,un:v1,...,vn', got '" + std::string(text) + "'");
    const auto side = [&](std::string_view part) {
        Point p;
        std::size_t start = 0;
        while (true) {
            const auto comma = part.find(',', start);
            p.push_back(Rational::parse(part.substr(start, comma - start)));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (p.size() != n)
            throw ParseError("'" + std::string(part) + "' has " + std::to_string(p.size()) + " coordinates, expected " +
                             std::to_string(n));
        return p;
    };
    Point u = side(text.substr(0, colon));
    Point v = side(text.substr(colon + 1));
    if (!leq(u, v))
        throw PreconditionError("'" + std::string(text) + "' does not satisfy u <= v");
    return {std::move(u), std::move(v)};
}

/// Calls fn(GradedComplex<F>) with the complex of a complex file, optionally
/// over another field.
template <class Fn>
decltype(auto) with_complex(const ComplexFile& file, const std::optional<std::string>& field, Fn&& fn) {
    const AnyField chosen = field ? parse_field(*field) : file.field;
    return std::visit([&](const auto& f) { return fn(GradedComplex(f, file.n_params, file.simplices)); }, chosen);
}

struct BuildOptions {
    std::optional<std::string> field;
    std::optional<int> max_dim;
};

inline void cmd_build(const std::filesystem::path& manifest_path, const BuildOptions& opt, std::ostream& out) {
    Manifest m = read_manifest(manifest_path);
    if (opt.field)
        m.field = parse_field(*opt.field);
    if (opt.max_dim) {
        if (*opt.max_dim < 0)
            throw PreconditionError("--max-dim must be nonnegative");
        m.max_dim = *opt.max_dim;
    }
    if (m.construction == Construction::explicit_graded) {
        const ComplexFile file = read_complex(m.complex);
        with_complex(file, field_name(m.field), [&](const auto& k) { write_complex(out, k); });
        return;
    }
    const MultiMetricSpace space = load_space(m);
    std::visit(
        [&](const auto& f) {
            if (m.construction == Construction::cech)
                write_complex(out, build_cech(f, space, m.max_dim));
            else
                write_complex(out, build_vietoris_rips(f, space, m.max_dim));
        },
        m.field);
}

struct DiagramOptions {
    int dim = 0;
    std::optional<std::string> window;
    std::vector<std::string> bars;
    std::optional<std::string> field;
};

/// Support in a window, or the values at query bars with the closed-form
/// cross-check. Returns exit_verify if a cross-check fails.
inline int cmd_diagram(const std::filesystem::path& complex_path, const DiagramOptions& opt, std::ostream& out) {
    if (opt.dim < 0)
        throw PreconditionError("--dim must be nonnegative");
    const ComplexFile file = read_complex(complex_path);
    return with_complex(file, opt.field, [&](const auto& k) {
        const RankFunction rf(k);
        const Grid grid = critical_grid(k);
        const std::size_t n = k.n_params();
        if (!opt.bars.empty()) {
            json queries = json::array();
            bool agree = true;
            for (const auto& text : opt.bars) {
                const Bar bar = parse_bar_text(text, n);
                const std::int64_t value = mobius_inversion_at(rf, opt.dim, bar, grid);
                const auto closed = static_cast<std::int64_t>(closed_form_at(rf, opt.dim, bar, grid));
                agree = agree && value == closed;
                queries.push_back({{"u", to_json(bar.u)},
                                   {"v", to_json(bar.v)},
                                   {"value", value},
                                   {"closed_form", closed},
                                   {"rank", rf.rank(opt.dim, bar)},
                                   {"in_poset", in_dgm(bar, grid)}});
            }
            out << json{{"dim", opt.dim}, {"field", k.field().name()}, {"queries", queries}, {"cross_check", agree}}
                       .dump(2)
                << '\n';
            return static_cast<int>(agree ? exit_ok : exit_verify);
        }
        const Bar window = opt.window ? parse_bar_text(*opt.window, n)
                                      : Bar{constant_point(n, grid.min()), constant_point(n, grid.max())};
        json j = to_json(support_in_window(rf, opt.dim, window, grid));
        j["dim"] = opt.dim;
        j["window"] = to_json(window);
        out << j.dump(2) << '\n';
        return static_cast<int>(exit_ok);
    });
}

inline void cmd_bottleneck(const std::filesystem::path& x, const std::filesystem::path& y, std::ostream& out) {
    const Diagram dx = read_diagram(x);
    const Diagram dy = read_diagram(y);
    out << to_json(bottleneck(dx, dy)).dump(2) << '\n';
}

/// Prints one line per property; exit_verify when any failed.
inline int print_report(const PropertySuite& suite, std::ostream& out) {
    for (const auto& r : suite.reports()) {
        out << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.checks << " checks";
        if (!r.passed())
            out << ", " << r.failures << " failed; first: " << r.counterexample;
        out << ")\n";
    }
    out << (suite.all_passed() ? "all properties hold" : "some properties FAILED") << '\n';
    return suite.all_passed() ? exit_ok : exit_verify;
}

/// Property checks on given complexes: each one alone, and every pair with
/// the same simplices and field for stability.
template <CoefficientField F>
void verify_complexes(PropertySuite& suite, const std::vector<GradedComplex<F>>& ks, const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    for (int t = 0; t < opt.trials; ++t)
        for (const auto& k : ks) {
            check_complex(suite, k, rng, opt.queries);
            if (k.n_params() == 1)
                check_one_parameter(suite, k);
        }
    for (std::size_t a = 0; a < ks.size(); ++a)
        for (std::size_t b = a + 1; b < ks.size(); ++b) {
            try {
                require_same_simplices(ks[a], ks[b]);
            } catch (const PreconditionError&) {
                continue;
            }
            for (int t = 0; t < opt.trials; ++t)
                check_stability(suite, ks[a], ks[b], rng, opt.queries, opt.line_pairs);
        }
}

inline int cmd_verify(const std::vector<std::filesystem::path>& files, const VerifyOptions& opt,
                      const std::optional<std::string>& field, std::ostream& out) {
    if (opt.trials < 0)
        throw PreconditionError("--trials must be nonnegative");
    PropertySuite suite;
    if (files.empty()) {
        suite = run_random_suite(opt);
    } else {
        std::vector<ComplexFile> loaded;
        for (const auto& p : files)
            loaded.push_back(read_complex(p));
        const AnyField chosen = field ? parse_field(*field) : loaded.front().field;
        std::visit(
            [&](const auto& f) {
                using Field = std::decay_t<decltype(f)>;
                std::vector<GradedComplex<Field>> ks;
                for (const auto& c : loaded)
                    ks.emplace_back(f, c.n_params, c.simplices);
                verify_complexes(suite, ks, opt);
            },
            chosen);
    }
    out << "seed " << opt.seed << ", trials " << opt.trials << '\n';
    return print_report(suite, out);
}

/// Three tables for an n = 2 stratified diagram: birth points, death points
/// and masses, keyed by a group id (one group per stratum and mass).
struct PlotData {
    std::string birth, death, mass;
};

inline PlotData plot_data(const Diagram& d, char sep) {
    if (d.n_params() != 2)
        throw PreconditionError("plot data needs a 2-parameter diagram, got n = " + std::to_string(d.n_params()));
    const auto bound = [](const std::optional<Rational>& x, const char* inf) { return x ? x->to_string() : inf; };
    using Key = std::tuple<std::string, std::string, std::string, std::string, std::int64_t>;
    std::map<Key, std::vector<Bar>> groups;
    for (const auto& [bar, e] : d.entries()) {
        Key key{"", "", "", "", e.mass};
        if (e.stratum)
            key = {bound(e.stratum->u_offset.lo, "-inf"), bound(e.stratum->u_offset.hi, "inf"),
                   bound(e.stratum->v_offset.lo, "-inf"), bound(e.stratum->v_offset.hi, "inf"), e.mass};
        groups[key].push_back(bar);
    }
    PlotData p;
    p.birth = std::string("group") + sep + "x" + sep + "y\n";
    p.death = p.birth;
    p.mass = std::string("group") + sep + "u_offset_lo" + sep + "u_offset_hi" + sep + "v_offset_lo" + sep +
             "v_offset_hi" + sep + "bars" + sep + "mass\n";
    std::size_t id = 0;
    for (const auto& [key, bars] : groups) {
        std::vector<Point> us, vs;
        for (const auto& b : bars) {
            us.push_back(b.u);
            vs.push_back(b.v);
        }
        for (auto* pts : {&us, &vs}) {
            std::sort(pts->begin(), pts->end());
            pts->erase(std::unique(pts->begin(), pts->end()), pts->end());
        }
        for (const auto& u : us)
            p.birth += std::to_string(id) + sep + u[0].to_string() + sep + u[1].to_string() + '\n';
        for (const auto& v : vs)
            p.death += std::to_string(id) + sep + v[0].to_string() + sep + v[1].to_string() + '\n';
        const auto& [ulo, uhi, vlo, vhi, mass] = key;
        p.mass += std::to_string(id) + sep + ulo + sep + uhi + sep + vlo + sep + vhi + sep +
                  std::to_string(bars.size()) + sep + std::to_string(mass) + '\n';
        ++id;
    }
    return p;
}

/// Writes <prefix>_birth.<ext>, <prefix>_death.<ext> and <prefix>_mass.<ext>,
/// or all three tables to `out` when no prefix is given.
inline void cmd_plotdata(const std::filesystem::path& diagram, const std::string& format,
                         const std::optional<std::filesystem::path>& prefix, std::ostream& out) {
    if (format != "csv" && format != "tsv")
        throw ParseError("unknown plot format '" + format + "' (expected csv or tsv)");
    const PlotData p = plot_data(read_diagram(diagram), format == "csv" ? ',' : '\t');
    if (!prefix) {
        out << "# birth\n" << p.birth << "# death\n" << p.death << "# mass\n" << p.mass;
        return;
    }
    const auto write = [&](const std::string& suffix, const std::string& body) {
        const std::filesystem::path path = prefix->string() + "_" + suffix + "." + format;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw PreconditionError("cannot write '" + path.string() + "'");
        f << body;
        out << path.string() << '\n';
    };
    write("birth", p.birth);
    write("death", p.death);
    write("mass", p.mass);
}

} // namespace mpers::cli
