// Command-line front end: solve | table | figure | check.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/harness.hpp"
#include "schwarzlin/kernels.hpp"

namespace {

using namespace schwarzlin;

void echo_config(const ExperimentConfig& cfg) {
    std::printf("problem = %s\n", family_name(cfg.problem));
    std::printf("alpha   = %g\n", cfg.alpha);
    if (cfg.problem == ModelFamily::monomial) std::printf("m       = %d\n", cfg.m);
    std::printf("fine    = %d   (h = 1/%d)\n", cfg.fine_n, cfg.fine_n);
    std::printf("coarse  = %d   (H = 1/%d)\n", cfg.coarse_n, cfg.coarse_n);
    std::printf("layers  = %d   (delta = %d h)\n", cfg.layers, cfg.layers);
    std::printf("levels  = %d\n", cfg.levels);
    std::printf("tau     = %g%s\n", cfg.tau != 0.0 ? cfg.tau : (cfg.levels == 2 ? 0.2 : 0.25),
                cfg.tau != 0.0 ? "" : " (default)");
    std::printf("iters   = %d\n", cfg.iters);
    std::printf("tol     = %g\n", cfg.tol);
    std::printf("out     = %s\n", cfg.out_dir.c_str());
    std::printf("seed    = %u\n", cfg.seed);
    std::printf("kernels = %s\n", std::string(kernels::isa_name()).c_str());
}

int cmd_solve(const std::vector<std::string>& args) {
    const ExperimentConfig cfg = parse_config(args);
    echo_config(cfg);
    const ExperimentResult res = run_experiment(cfg);
    std::printf("reference energy  = %.16e\n", res.reference_energy);
    std::printf("final energy      = %.16e\n", res.records.back().energy);
    std::printf("final rel error   = %.6e\n", res.records.back().rel_error);
    std::printf("geometric rate    = %.4f (over %d iterations)\n",
                geometric_mean_rate(res.records, cfg.iters), cfg.iters);
    std::printf("max inner iters   = %d\n", res.schwarz.max_inner_iterations);
    std::printf("csv               = %s\n", res.csv_path.c_str());
    return 0;
}

int cmd_table(const std::string& id, const std::string& out) {
    const TableResult table = reproduce_table(id, out);
    std::printf("table %s (tolerance %g):\n%s", table.id.c_str(), table.tolerance,
                table.text.c_str());
    std::printf("%s\n", table.all_within ? "all cells within tolerance"
                                         : "some cells OUTSIDE tolerance");
    return table.all_within ? 0 : 1;
}

int cmd_figure(const std::string& id, const std::string& out, bool large) {
    run_figure(id, out, large);
    std::printf("figures written under %s\n", out.c_str());
    return 0;
}

int cmd_check(const std::string& selector, unsigned seed) {
    const CheckReport report = check_suite(selector.empty() ? "all" : selector, seed);
    for (const CheckOutcome& c : report.outcomes)
        std::printf("%s %-28s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one- and two-level additive Schwarz solvers for semilinear elliptic energies"};
    app.require_subcommand(1);

    CLI::App* solve = app.add_subcommand("solve", "run one configuration");
    solve->allow_extras();

    std::string table_id, figure_id, out_dir = "out", selector = "all";
    bool large = false;
    unsigned seed = 0;

    CLI::App* table = app.add_subcommand("table", "reproduce a published table");
    table->add_option("id", table_id, "monomial|pb|newton|l1")->required();
    table->add_option("--out", out_dir, "output directory");

    CLI::App* figure = app.add_subcommand("figure", "error-decay figures over a mesh sweep");
    figure->add_option("id", figure_id, "monomial|pb|l1")->required();
    figure->add_option("--out", out_dir, "output directory");
    figure->add_flag("--large", large, "include h = 2^-8 and 2^-9 (minutes)");

    CLI::App* check = app.add_subcommand("check", "run the property-check suite");
    check->add_option("selector", selector, "check-name prefix, default all");
    check->add_option("--seed", seed, "seed for the randomized samples");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(solve->remaining());
        if (table->parsed()) return cmd_table(table_id, out_dir);
        if (figure->parsed()) return cmd_figure(figure_id, out_dir, large);
        if (check->parsed()) return cmd_check(selector, seed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const schwarzlin::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == schwarzlin::Errc::usage ? 2 : 1;
    }
    return 0;
}
