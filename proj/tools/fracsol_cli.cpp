#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracsol/commands.hpp"

int main(int argc, char** argv) {
    using namespace fracsol;
    CLI::App app{"fracsol: least-energy solutions of the fractional semilinear equation"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::uint64_t seed = 0;
    std::vector<int> copies;
    std::string mode;
    double eps = 0.0;

    app.add_option("--threads", opt.threads, "Concurrent solves in a sweep")->check(CLI::PositiveNumber);

    auto with_config = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--config", opt.config, "Run configuration (JSON)");
        if (required) o->required();
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--threads", opt.threads, "Concurrent solves in a sweep")->check(CLI::PositiveNumber);
    };
    auto with_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "Overrides the config seed"); };
    auto with_field = [&](CLI::App* sub) { sub->add_option("--field", opt.field, "Field file")->required(); };

    auto* solve = app.add_subcommand("solve", "Minimize the quotient on one domain");
    with_config(solve, true);
    with_seed(solve);
    solve->add_option("--eps", eps, "Concentration epsilon");

    auto* sweep = app.add_subcommand("sweep", "Solve across the R list of the config");
    with_config(sweep, true);
    with_seed(sweep);
    sweep->add_option("--eps", eps, "Concentration epsilon");

    auto* ext = app.add_subcommand("extend", "Tile a field file by reflections or phases");
    with_config(ext, false);
    with_field(ext);
    ext->add_option("--mode", mode, "even | odd | mixed | quasi_phase");
    ext->add_option("--copies", copies, "Copies per axis")->expected(2);

    auto* render = app.add_subcommand("render", "Write a PGM/PPM image of a field file");
    render->add_option("--out", opt.out, "Output directory");
    with_field(render);
    render->add_flag("--overlay", opt.overlay, "Also write an image with structure points marked");

    auto* diag = app.add_subcommand("diagnose", "Concentration report of a field file");
    diag->add_option("--out", opt.out, "Output directory");
    with_field(diag);
    diag->add_option("--eps", eps, "Concentration epsilon");

    auto* stv = app.add_subcommand("stverify", "Extension identity and trace checks");
    with_config(stv, true);
    with_seed(stv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (auto* sub : {solve, sweep, stv}) {
        if (sub->parsed() && sub->count("--seed") > 0) opt.seed = seed;
    }
    for (auto* sub : {solve, sweep, diag}) {
        if (sub->parsed() && sub->count("--eps") > 0) opt.eps = eps;
    }
    if (ext->parsed()) {
        if (ext->count("--mode") > 0) opt.mode = mode;
        if (copies.size() == 2) opt.copies = std::array<int, 2>{copies[0], copies[1]};
    }

    try {
        if (solve->parsed()) return cmd_solve(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (ext->parsed()) return cmd_extend(opt);
        if (render->parsed()) return cmd_render(opt);
        if (diag->parsed()) return cmd_diagnose(opt);
        if (stv->parsed()) return cmd_stverify(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
