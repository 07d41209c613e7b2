#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

// Output goes to --out when given, else stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw mpers::PreconditionError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

} // namespace

int main(int argc, char** argv) {
    using namespace mpers::cli;
    CLI::App app{"Multiparameter persistence diagrams by Moebius inversion of the birth-death rank function."};
    app.require_subcommand(1);

    std::string out_path;
    std::optional<std::string> field;
    int max_dim = -1;
    int dim = 0;
    std::optional<std::string> window;
    std::vector<std::string> bars;
    std::uint64_t seed = 1;
    int trials = 5;
    std::string manifest, complex_path, x_path, y_path, diagram_path, format = "csv";
    std::vector<std::string> verify_files;

    auto* build = app.add_subcommand("build", "build a graded complex from a manifest");
    build->add_option("manifest", manifest, "manifest JSON")->required();
    build->add_option("--field", field, "coefficient field: Q or Fp:<p>");
    build->add_option("--max-dim", max_dim, "largest simplex dimension");
    build->add_option("--out", out_path, "output file");

    auto* diagram = app.add_subcommand("diagram", "persistence diagram of a graded complex");
    diagram->add_option("complex", complex_path, "graded-complex file")->required();
    diagram->add_option("--dim", dim, "homology degree");
    diagram->add_option("--field", field, "coefficient field: Q or Fp:<p>");
    diagram->add_option("--window", window, "window u1,u2:v1,v2 (default: the whole grid)");
    diagram->add_option("--bar", bars, "query bar u1,u2:v1,v2 (repeatable)");
    diagram->add_option("--out", out_path, "output file");

    auto* bneck = app.add_subcommand("bottleneck", "bottleneck distance between two diagram files");
    bneck->add_option("x", x_path, "first diagram JSON")->required();
    bneck->add_option("y", y_path, "second diagram JSON")->required();
    bneck->add_option("--out", out_path, "output file");

    auto* verify = app.add_subcommand("verify", "randomised property suite");
    verify->add_option("complexes", verify_files, "graded-complex files (default: random Vietoris-Rips)");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--trials", trials, "number of trials");
    verify->add_option("--field", field, "coefficient field for complex files");
    verify->add_option("--out", out_path, "output file");

    auto* plot = app.add_subcommand("plotdata", "plot tables for a 2-parameter diagram");
    plot->add_option("diagram", diagram_path, "diagram JSON")->required();
    plot->add_option("--format", format, "csv or tsv");
    plot->add_option("--out", out_path, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*build) {
            Sink sink(out_path);
            BuildOptions opt{field, max_dim >= 0 ? std::optional<int>(max_dim) : std::nullopt};
            cmd_build(manifest, opt, sink.stream());
            return exit_ok;
        }
        if (*diagram) {
            Sink sink(out_path);
            return cmd_diagram(complex_path, DiagramOptions{dim, window, bars, field}, sink.stream());
        }
        if (*bneck) {
            Sink sink(out_path);
            cmd_bottleneck(x_path, y_path, sink.stream());
            return exit_ok;
        }
        if (*verify) {
            Sink sink(out_path);
            mpers::VerifyOptions opt;
            opt.seed = seed;
            opt.trials = trials;
            std::vector<std::filesystem::path> files(verify_files.begin(), verify_files.end());
            return cmd_verify(files, opt, field, sink.stream());
        }
        if (*plot) {
            cmd_plotdata(diagram_path, format,
                         out_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_path), std::cout);
            return exit_ok;
        }
    } catch (const mpers::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const mpers::PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_precondition;
    } catch (const mpers::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_precondition;
    }
    return exit_usage;
}
