#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "crnf/commands.hpp"

using namespace crnf;

namespace {

int emit(const CommandResult& res, const std::string& json_out) {
    std::string text = res.doc.dump(2) + "\n";
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) {
            std::cerr << "cannot write " << json_out << "\n";
            return 1;
        }
        out << text;
    }
    std::cout << text;
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact invariants, symmetry bounds and formal normal forms for "
                 "real hypersurfaces in C^2"};
    app.require_subcommand(1);

    std::string file_a, file_b, map_file, json_out, mode, choice, free_param, lambda_arg;
    int degree = 0;
    long precision = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--degree", degree, "working truncation order");
        cmd->add_option("--json-out", json_out, "also write the report to a file");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "invariants and symmetry decisions");
    analyze->add_option("file", file_a, "hypersurface file")->required();
    add_common(analyze);

    CLI::App* normalize = app.add_subcommand("normalize", "construct the formal normal form");
    normalize->add_option("file", file_a, "hypersurface file")->required();
    normalize->add_option("--mode", mode, "exact or ball")
        ->check(CLI::IsMember({"exact", "ball"}));
    normalize->add_option("--precision", precision, "ball-mode precision in bits");
    normalize->add_option("--choice", choice, "triple alpha,n,mu used for the straightening");
    normalize->add_option("--free", free_param, "free parameter at the degenerate step");
    add_common(normalize);

    CLI::App* equiv = app.add_subcommand("equiv", "decide formal equivalence");
    equiv->add_option("first", file_a, "first hypersurface file")->required();
    equiv->add_option("second", file_b, "second hypersurface file")->required();
    add_common(equiv);

    CLI::App* check = app.add_subcommand("check-map", "verify that a map sends one "
                                                      "hypersurface into another");
    check->add_option("file", file_a, "source hypersurface file")->required();
    check->add_option("--map", map_file, "map file with F and G")->required();
    check->add_option("--target", file_b, "target hypersurface file (defaults to the source)");
    add_common(check);

    CLI::App* symmetry = app.add_subcommand("symmetry", "group bounds from a triple set");
    symmetry->add_option("--lambda", lambda_arg, "triples 'a,n,mu;a,n,mu;...'")->required();
    add_common(symmetry);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) {
            HypersurfaceFile f = load_hypersurface_file(file_a);
            return emit(cmd_analyze(f, degree > 0 ? std::optional<int>(degree) : std::nullopt),
                        json_out);
        }
        if (app.got_subcommand(normalize)) {
            HypersurfaceFile f = load_hypersurface_file(file_a);
            NormalizeArgs args;
            if (degree > 0) args.degree = degree;
            if (!mode.empty()) args.mode = mode;
            if (precision > 0) args.precision = precision;
            if (!choice.empty()) args.choice = parse_triple_arg(choice);
            if (!free_param.empty()) args.free_param = parse_rat_arg(free_param);
            return emit(cmd_normalize(f, args), json_out);
        }
        if (app.got_subcommand(equiv)) {
            HypersurfaceFile a = load_hypersurface_file(file_a);
            HypersurfaceFile b = load_hypersurface_file(file_b);
            return emit(cmd_equiv(a, b, degree > 0 ? std::optional<int>(degree) : std::nullopt),
                        json_out);
        }
        if (app.got_subcommand(check)) {
            HypersurfaceFile src = load_hypersurface_file(file_a);
            HypersurfaceFile tgt = file_b.empty() ? src : load_hypersurface_file(file_b);
            MapFile m = load_map_file(map_file, src.truncation);
            return emit(cmd_check_map(src, m, tgt), json_out);
        }
        if (app.got_subcommand(symmetry)) {
            return emit(cmd_symmetry(parse_lambda_arg(lambda_arg)), json_out);
        }
    } catch (const ToolkitError& e) {
        std::cerr << json_error(e).dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
