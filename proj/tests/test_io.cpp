#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <mpers/io.hpp>
#include <mpers/random.hpp>

using namespace mpers;
using Q = RationalField;

namespace {

Point pt(std::initializer_list<Rational> xs) { return Point(xs); }

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "mpers_test_io";
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& body) {
    const auto p = scratch_dir() / name;
    std::ofstream(p) << body;
    return p;
}

std::size_t error_line(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("distance matrices") {
    std::istringstream csv("# comment\na,b,c\n0,1,2\n1,0,3/2\n2,3/2,0\n");
    const auto m = read_distance_matrix(csv);
    CHECK(m.points == 3);
    CHECK(m.entries[5] == Rational(3, 2));

    std::istringstream blanks("0 0.5\n0.5 0\n");
    CHECK(read_distance_matrix(blanks).entries[1] == Rational(1, 2));

    std::istringstream ragged("0,1\n1,0,2\n");
    CHECK(error_line([&] { read_distance_matrix(ragged); }) == 2);
    std::istringstream junk("0,1\n1,x\n");
    CHECK(error_line([&] { read_distance_matrix(junk); }) == 2);
    std::istringstream wide("0,1,2\n1,0,2\n");
    CHECK_THROWS_AS(read_distance_matrix(wide), ParseError);
    CHECK_THROWS_AS(read_distance_matrix(scratch_dir() / "does_not_exist.csv"), ParseError);
}

TEST_CASE("manifests") {
    write_file("m1.csv", "0,1\n1,0\n");
    write_file("m2.csv", "0,2\n2,0\n");
    write_file("m3.csv", "0,1,1\n1,0,1\n1,1,0\n");
    const auto m = parse_manifest(json::parse(R"({"metrics": ["m1.csv", "m2.csv"]})"), scratch_dir());
    CHECK(m.metrics.size() == 2);
    CHECK(m.construction == Construction::vietoris_rips);
    CHECK(field_name(m.field) == "Q");
    CHECK(m.max_dim == 2);
    CHECK(load_space(m).point_count() == 2);

    const auto c = parse_manifest(
        json::parse(R"({"metrics": ["m1.csv"], "construction": "cech", "field": "Fp:3", "homology_dims": [0]})"),
        scratch_dir());
    CHECK(c.construction == Construction::cech);
    CHECK(field_name(c.field) == "Fp:3");
    CHECK(c.max_dim == 1);

    CHECK_THROWS_AS(parse_manifest(json::parse(R"({"metrics": ["nope.csv"]})"), scratch_dir()), ParseError);
    CHECK_THROWS_AS(parse_manifest(json::parse(R"({"metrics": []})"), scratch_dir()), ParseError);
    CHECK_THROWS_AS(parse_manifest(json::parse(R"({"metrics": ["m1.csv"], "field": "Fp:4"})"), scratch_dir()),
                    PreconditionError);
    CHECK_THROWS_AS(parse_manifest(json::parse(R"({"metrics": ["m1.csv"], "construction": "alpha"})"), scratch_dir()),
                    ParseError);
    CHECK_THROWS_AS(parse_manifest(json::parse(R"({"construction": "explicit-graded"})"), scratch_dir()),
                    ParseError);
    CHECK_THROWS_AS(parse_manifest(json::parse(R"([1, 2])"), scratch_dir()), ParseError);

    const auto mixed = parse_manifest(json::parse(R"({"metrics": ["m1.csv", "m3.csv"]})"), scratch_dir());
    CHECK_THROWS_AS(load_space(mixed), DimensionMismatch);
    write_file("empty.csv", "# nothing\n");
    const auto empty = parse_manifest(json::parse(R"({"metrics": ["empty.csv"]})"), scratch_dir());
    CHECK_THROWS_WITH(load_space(empty), Catch::Matchers::ContainsSubstring("empty space"));
    write_file("asym.csv", "0,1\n2,0\n");
    const auto asym = parse_manifest(json::parse(R"({"metrics": ["asym.csv"]})"), scratch_dir());
    CHECK_THROWS_AS(load_space(asym), PreconditionError);
}

TEST_CASE("complex files round-trip") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        const auto k = build_vietoris_rips(Q{}, random_space(rng, 5, 2), 2);
        std::ostringstream out;
        write_complex(out, k);
        std::istringstream in(out.str());
        const ComplexFile file = read_complex(in);
        CHECK(file.n_params == 2);
        const GradedComplex<Q> back(Q{}, file.n_params, file.simplices);
        CHECK(back == k);
        std::ostringstream again;
        write_complex(again, back);
        CHECK(again.str() == out.str());
    }
}

TEST_CASE("complex file errors carry line numbers") {
    const auto line_of = [](const std::string& text) {
        std::istringstream in(text);
        return error_line([&] { read_complex(in); });
    };
    CHECK(line_of("params 2\n0 : 0 0\n1 : 0\n") == 3);
    CHECK(line_of("params 2\nx : 0 0\n") == 2);
    CHECK(line_of("params 2\n0 : 0 a\n") == 2);
    CHECK(line_of("0 : 0 0\n") == 1);
    CHECK(line_of("params 2\nfield Fp:6\n") == 2);
    CHECK(line_of("params 2\nbogus\n") == 2);
    CHECK(line_of("params 2\n : 1 1\n") == 2);
    std::istringstream none("# nothing here\n");
    CHECK_THROWS_AS(read_complex(none), ParseError);

    // structural problems surface when the complex is built
    std::istringstream missing_face("params 1\n0 : 0\n0 1 : 1\n");
    const auto f = read_complex(missing_face);
    CHECK_THROWS_AS(GradedComplex<Q>(Q{}, f.n_params, f.simplices), PreconditionError);
    std::istringstream twice("params 1\n0 : 0\n0 : 1\n");
    const auto g = read_complex(twice);
    CHECK_THROWS_AS(GradedComplex<Q>(Q{}, g.n_params, g.simplices), PreconditionError);
}

TEST_CASE("JSON for rationals, bars and diagrams") {
    CHECK(to_json(Rational(-3, 4)) == json("-3/4"));
    CHECK(rational_from_json(json("6/8")) == Rational(3, 4));
    CHECK(rational_from_json(json(5)) == Rational(5));
    CHECK(rational_from_json(json::parse("0.25")) == Rational(1, 4));
    CHECK_THROWS_AS(rational_from_json(json(true)), ParseError);

    Diagram d(2, "Q");
    d.add(Bar{pt({0, 1}), pt({3, 5})}, 2,
          Stratum{{Rational(1), Rational(1)}, {std::nullopt, Rational(2)}});
    d.add(Bar{pt({1, 1}), pt({4, 4})}, 1);
    d.set_grid(Grid({0, 1, 3}, 2));
    const json j = to_json(d);
    CHECK(j.at("entries").size() == 2);
    CHECK(j.at("entries")[0].at("stratum").at("v_offset_interval")[0].is_null());
    const Diagram back = diagram_from_json(j);
    CHECK(back == d);
    REQUIRE(back.grid());
    CHECK(back.grid()->values() == std::vector<Rational>{0, 1, 3});

    // radius-zero bars survive a round trip
    Diagram diag(2, "Q");
    diag.add(Bar{pt({1, 1}), pt({1, 2})}, 1);
    CHECK(diagram_from_json(to_json(diag)) == diag);

    CHECK_THROWS_AS(diagram_from_json(json::parse(R"({"entries": []})")), ParseError);
    CHECK_THROWS_AS(diagram_from_json(json::parse(R"({"n": 2, "entries": [{"u": ["1","1"], "v": ["0","0"], "mass": 1}]})")),
                    ParseError);
    CHECK_THROWS_AS(diagram_from_json(json::parse(R"({"n": 2, "entries": [{"u": ["0","0"], "v": ["1","1"], "mass": 0}]})")),
                    ParseError);
    CHECK_THROWS_AS(diagram_from_json(json::parse(R"({"n": 2, "entries": [{"u": ["0"], "v": ["1"], "mass": 1}]})")),
                    ParseError);
}

TEST_CASE("matching JSON") {
    Diagram x(2, "Q"), y(2, "Q");
    x.add(Bar{pt({0, 1}), pt({3, 5})}, 1);
    x.add(Bar{pt({0, 4}), pt({1, 5})}, 1);
    y.add(Bar{pt({1, 2}), pt({2, 4})}, 1);
    const json j = to_json(bottleneck(x, y));
    CHECK(j.at("norm") == json("1"));
    CHECK(j.at("dropped_diagonal_bars") == 0);
    bool saw_diagonal = false;
    for (const auto& m : j.at("matching"))
        if (m.at("to_bar") == json("diagonal")) {
            saw_diagonal = true;
            CHECK(m.at("diagonal_bar").at("u") == json::array({"1/2", "9/2"}));
            CHECK(m.at("cost") == json("1/2"));
        }
    CHECK(saw_diagonal);

    Diagram a(2, "Q"), b(2, "Q");
    a.add(Bar{pt({0, 0}), pt({4, 4})}, 1);
    b.add(Bar{pt({1, 0}), pt({5, 4})}, 1);
    CHECK(to_json(bottleneck(a, b)).at("norm") == json("2"));
}
