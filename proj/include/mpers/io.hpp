#pragma once

// Text formats: distance matrices (CSV or whitespace), JSON manifests,
// graded-complex files, and JSON diagrams and matchings. Every number is
// written as an exact "p/q" string.

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "diagram.hpp"
#include "distances.hpp"
#include "errors.hpp"
#include "exactnum.hpp"
#include "filtration.hpp"

namespace mpers {

using json = nlohmann::json;

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string current;
    for (char c : line) {
        if (c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\r') {
            if (!current.empty())
                out.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty())
        out.push_back(std::move(current));
    return out;
}

inline std::string_view strip_comment(std::string_view line) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
    return trim(line);
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'");
    return in;
}

} // namespace detail

/// A square matrix of rationals separated by commas, semicolons or blanks.
/// A first row that does not parse as numbers is taken as a header.
struct DistanceMatrix {
    std::size_t points = 0;
    std::vector<Rational> entries; // row-major
};

inline DistanceMatrix read_distance_matrix(std::istream& in) {
    DistanceMatrix m;
    std::string line;
    std::size_t line_no = 0;
    bool first_row = true;
    std::vector<std::vector<Rational>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = detail::strip_comment(line);
        if (content.empty())
            continue;
        const auto fields = detail::split_fields(content);
        std::vector<Rational> row;
        try {
            for (const auto& f : fields)
                row.push_back(Rational::parse(f));
        } catch (const Error& e) {
            if (first_row) {
                first_row = false;
                continue; // header
            }
            throw ParseError(e.what(), line_no);
        }
        first_row = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(rows.front().size()),
                             line_no);
        rows.push_back(std::move(row));
    }
    if (!rows.empty() && rows.size() != rows.front().size())
        throw ParseError("distance matrix has " + std::to_string(rows.size()) + " rows and " +
                         std::to_string(rows.front().size()) + " columns");
    m.points = rows.size();
    for (auto& r : rows)
        m.entries.insert(m.entries.end(), r.begin(), r.end());
    return m;
}

inline DistanceMatrix read_distance_matrix(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read_distance_matrix(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

enum class Construction { vietoris_rips, cech, explicit_graded };

inline Construction parse_construction(const std::string& s) {
    if (s == "vietoris-rips" || s == "rips" || s == "vr")
        return Construction::vietoris_rips;
    if (s == "cech")
        return Construction::cech;
    if (s == "explicit-graded" || s == "explicit")
        return Construction::explicit_graded;
    throw ParseError("unknown construction '" + s + "' (expected vietoris-rips, cech or explicit-graded)");
}

struct Manifest {
    std::vector<std::filesystem::path> metrics;
    std::filesystem::path complex; // for explicit-graded
    Construction construction = Construction::vietoris_rips;
    AnyField field = RationalField{};
    std::vector<int> homology_dims{0, 1};
    int max_dim = 2;
};

/// {"metrics": [...], "construction": ..., "field": ..., "max_dim": ...,
///  "homology_dims": [...], "complex": ...}; relative paths are resolved
/// against the manifest's directory.
inline Manifest parse_manifest(const json& j, const std::filesystem::path& base = {}) {
    if (!j.is_object())
        throw ParseError("manifest must be a JSON object");
    Manifest m;
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() || base.empty() ? path : base / path;
    };
    try {
        if (j.contains("construction"))
            m.construction = parse_construction(j.at("construction").get<std::string>());
        if (j.contains("field"))
            m.field = parse_field(j.at("field").get<std::string>());
        if (j.contains("homology_dims"))
            m.homology_dims = j.at("homology_dims").get<std::vector<int>>();
        if (m.homology_dims.empty())
            throw ParseError("homology_dims must not be empty");
        m.max_dim = *std::max_element(m.homology_dims.begin(), m.homology_dims.end()) + 1;
        if (j.contains("max_dim"))
            m.max_dim = j.at("max_dim").get<int>();
        if (m.max_dim < 0)
            throw ParseError("max_dim must be nonnegative");
        if (j.contains("metrics"))
            for (const auto& p : j.at("metrics"))
                m.metrics.push_back(resolve(p.get<std::string>()));
        if (j.contains("complex"))
            m.complex = resolve(j.at("complex").get<std::string>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    if (m.construction == Construction::explicit_graded) {
        if (m.complex.empty())
            throw ParseError("an explicit-graded manifest needs a \"complex\" file");
    } else if (m.metrics.empty()) {
        throw ParseError("manifest lists no metric files");
    }
    for (const auto& p : m.metrics)
        if (!std::filesystem::exists(p))
            throw ParseError("metric file '" + p.string() + "' does not exist");
    return m;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_manifest(j, path.parent_path());
}

inline MultiMetricSpace load_space(const Manifest& m) {
    std::vector<std::vector<Rational>> metrics;
    std::size_t points = 0;
    for (std::size_t k = 0; k < m.metrics.size(); ++k) {
        DistanceMatrix d = read_distance_matrix(m.metrics[k]);
        if (k == 0)
            points = d.points;
        else if (d.points != points)
            throw DimensionMismatch("metric file '" + m.metrics[k].string() + "' has " + std::to_string(d.points) +
                                    " points, expected " + std::to_string(points));
        metrics.push_back(std::move(d.entries));
    }
    if (points == 0)
        throw PreconditionError("empty space");
    return MultiMetricSpace(points, std::move(metrics));
}

/// Contents of a graded-complex file before a field is attached.
struct ComplexFile {
    std::size_t n_params = 0;
    AnyField field = RationalField{};
    std::vector<Simplex> simplices;
};

/// Lines "params n", "field F", optional "grid s1 s2 ...", then one
/// "v0 v1 ... vk : g1 ... gn" per simplex. The empty simplex is implicit.
inline ComplexFile read_complex(std::istream& in) {
    ComplexFile out;
    std::string line;
    std::size_t line_no = 0;
    bool have_params = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = detail::strip_comment(line);
        if (content.empty())
            continue;
        try {
            const auto colon = content.find(':');
            if (colon == std::string_view::npos) {
                const auto fields = detail::split_fields(content);
                if (fields[0] == "params") {
                    if (fields.size() != 2 || !detail::all_digits(fields[1]) || fields[1].size() > 3)
                        throw ParseError("expected 'params <n>'");
                    out.n_params = std::stoul(fields[1]);
                    have_params = true;
                } else if (fields[0] == "field") {
                    if (fields.size() != 2)
                        throw ParseError("expected 'field <Q|Fp:p>'");
                    out.field = parse_field(fields[1]);
                } else if (fields[0] == "grid") {
                    for (std::size_t i = 1; i < fields.size(); ++i)
                        (void)Rational::parse(fields[i]);
                } else {
                    throw ParseError("expected 'v0 ... vk : g1 ... gn'");
                }
                continue;
            }
            if (!have_params)
                throw ParseError("the 'params <n>' line must come before the simplices");
            Simplex s;
            for (const auto& v : detail::split_fields(content.substr(0, colon))) {
                if (!detail::all_digits(v) || v.size() > 9)
                    throw ParseError("bad vertex '" + v + "'");
                s.vertices.push_back(static_cast<std::uint32_t>(std::stoul(v)));
            }
            for (const auto& g : detail::split_fields(content.substr(colon + 1)))
                s.grade.push_back(Rational::parse(g));
            if (s.vertices.empty())
                throw ParseError("simplex without vertices");
            if (s.grade.size() != out.n_params)
                throw ParseError("expected " + std::to_string(out.n_params) + " grade coordinates, got " +
                                 std::to_string(s.grade.size()));
            out.simplices.push_back(std::move(s));
        } catch (const ParseError& e) {
            if (e.line() != 0)
                throw;
            throw ParseError(e.what(), line_no);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (!have_params)
        throw ParseError("missing 'params <n>' line");
    return out;
}

inline ComplexFile read_complex(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read_complex(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

template <CoefficientField F>
void write_complex(std::ostream& out, const GradedComplex<F>& k) {
    out << "params " << k.n_params() << '\n' << "field " << k.field().name() << '\n' << "grid";
    const Grid grid = critical_grid(k);
    for (const auto& s : grid.values())
        out << ' ' << s;
    out << '\n';
    for (int d = 0; d <= k.top_dim(); ++d)
        for (const auto& s : k.simplices(d)) {
            for (std::size_t i = 0; i < s.vertices.size(); ++i)
                out << (i ? " " : "") << s.vertices[i];
            out << " :";
            for (const auto& g : s.grade)
                out << ' ' << g;
            out << '\n';
        }
}

// ---- JSON ----

inline json to_json(const Rational& r) { return r.to_string(); }

inline Rational rational_from_json(const json& j) {
    if (j.is_string())
        return Rational::parse(j.get<std::string>());
    if (j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    if (j.is_number())
        return Rational::parse(j.dump());
    throw ParseError("expected a rational number, got " + j.dump());
}

inline json to_json(const Point& p) {
    json a = json::array();
    for (const auto& x : p)
        a.push_back(to_json(x));
    return a;
}

inline Point point_from_json(const json& j) {
    if (!j.is_array())
        throw ParseError("expected an array of coordinates, got " + j.dump());
    Point p;
    for (const auto& x : j)
        p.push_back(rational_from_json(x));
    return p;
}

inline json to_json(const Bar& b) { return {{"u", to_json(b.u)}, {"v", to_json(b.v)}}; }

inline Bar bar_from_json(const json& j) {
    if (!j.is_object() || !j.contains("u") || !j.contains("v"))
        throw ParseError("expected a bar {\"u\": [...], \"v\": [...]}, got " + j.dump());
    return make_bar(point_from_json(j.at("u")), point_from_json(j.at("v")));
}

inline json to_json(const OffsetInterval& o) {
    return json::array({o.lo ? to_json(*o.lo) : json(nullptr), o.hi ? to_json(*o.hi) : json(nullptr)});
}

inline OffsetInterval offset_interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("expected an offset interval [lo, hi], got " + j.dump());
    OffsetInterval o;
    if (!j[0].is_null())
        o.lo = rational_from_json(j[0]);
    if (!j[1].is_null())
        o.hi = rational_from_json(j[1]);
    return o;
}

inline json to_json(const Diagram& d) {
    json entries = json::array();
    for (const auto& [bar, e] : d.entries()) {
        json item = {{"u", to_json(bar.u)}, {"v", to_json(bar.v)}, {"mass", e.mass}};
        if (e.stratum)
            item["stratum"] = {{"u_offset_interval", to_json(e.stratum->u_offset)},
                               {"v_offset_interval", to_json(e.stratum->v_offset)}};
        entries.push_back(std::move(item));
    }
    json out = {{"n", d.n_params()}, {"field", d.field()}, {"entries", std::move(entries)}};
    if (d.grid())
        out["grid"] = to_json(Point(d.grid()->values()));
    return out;
}

inline Diagram diagram_from_json(const json& j) {
    try {
        if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
            throw ParseError("a diagram needs \"n\" and \"entries\"");
        const auto n = j.at("n").get<std::size_t>();
        if (n == 0)
            throw ParseError("a diagram needs n >= 1");
        Diagram d(n, j.value("field", std::string("Q")));
        for (const auto& e : j.at("entries")) {
            const Bar bar = bar_from_json(e);
            const auto mass = e.at("mass").get<std::int64_t>();
            if (mass <= 0)
                throw ParseError("diagram masses must be positive, got " + std::to_string(mass));
            std::optional<Stratum> stratum;
            if (e.contains("stratum"))
                stratum = Stratum{offset_interval_from_json(e.at("stratum").at("u_offset_interval")),
                                  offset_interval_from_json(e.at("stratum").at("v_offset_interval"))};
            d.add(bar, mass, stratum);
        }
        if (j.contains("grid"))
            d.set_grid(Grid(point_from_json(j.at("grid")), n));
        return d;
    } catch (const json::exception& e) {
        throw ParseError(std::string("diagram: ") + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("diagram: ") + e.what());
    }
}

inline Diagram read_diagram(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        return diagram_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// [{from_bar, to_bar | "diagonal", mass, cost}, ...]; mass created on the
/// diagonal has from_bar "diagonal".
inline json to_json(const Matching& m) {
    json out = json::array();
    for (const auto& p : m.pairs)
        out.push_back({{"from_bar", to_json(p.from)}, {"to_bar", to_json(p.to)}, {"mass", p.mass},
                       {"cost", to_json(p.cost)}});
    for (const auto& d : m.to_diagonal)
        out.push_back({{"from_bar", to_json(d.bar)}, {"to_bar", "diagonal"},
                       {"diagonal_bar", to_json(nearest_diagonal(d.bar))}, {"mass", d.mass},
                       {"cost", to_json(d.cost)}});
    for (const auto& d : m.from_diagonal)
        out.push_back({{"from_bar", "diagonal"}, {"to_bar", to_json(d.bar)},
                       {"diagonal_bar", to_json(nearest_diagonal(d.bar))}, {"mass", d.mass},
                       {"cost", to_json(d.cost)}});
    return out;
}

inline json to_json(const BottleneckResult& r) {
    return {{"norm", r.norm ? to_json(*r.norm) : json("infinity")},
            {"matching", to_json(r.matching)},
            {"dropped_diagonal_bars", r.dropped_diagonal}};
}

} // namespace mpers
