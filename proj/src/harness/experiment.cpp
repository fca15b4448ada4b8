#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include <CLI11.hpp>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/harness.hpp"

namespace schwarzlin {

namespace {

ModelFamily parse_family(const std::string& s) {
    if (s == "monomial") return ModelFamily::monomial;
    if (s == "pb") return ModelFamily::poisson_boltzmann;
    if (s == "l1") return ModelFamily::l1;
    raise(Errc::usage, "unknown problem '" + s + "' (expected monomial|pb|l1)");
}

}  // namespace

ExperimentConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"experiment configuration"};
    app.allow_config_extras(false);

    ExperimentConfig cfg;
    std::string problem = "monomial";
    app.add_option("--problem", problem, "monomial|pb|l1");
    app.add_option("--alpha", cfg.alpha, "nonlinearity strength");
    app.add_option("--m", cfg.m, "monomial exponent (required for monomial)");
    app.add_option("--fine", cfg.fine_n, "fine mesh subdivisions (h = 1/fine)");
    app.add_option("--coarse", cfg.coarse_n, "coarse mesh subdivisions (H = 1/coarse)");
    app.add_option("--layers", cfg.layers, "overlap width in fine layers (delta = layers*h)");
    app.add_option("--levels", cfg.levels, "1 = one-level, 2 = two-level");
    app.add_option("--tau", cfg.tau, "step size (default 1/4 one-level, 1/5 two-level)");
    app.add_option("--iters", cfg.iters, "outer iterations");
    app.add_option("--tol", cfg.tol, "local solver tolerance (relative energy change)");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_flag("--large", cfg.large, "enable the expensive mesh sizes");
    app.add_option("--seed", cfg.seed, "seed for randomized checks");
    app.set_config("--config", "", "flat key = value config file; flags take precedence");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        raise(Errc::usage, e.what());
    }

    cfg.problem = parse_family(problem);
    if (cfg.problem == ModelFamily::monomial && cfg.m < 2)
        raise(Errc::usage, "--m >= 2 is required for the monomial problem");
    if (cfg.levels != 1 && cfg.levels != 2) raise(Errc::usage, "--levels must be 1 or 2");
    if (cfg.iters < 1) raise(Errc::usage, "--iters must be positive");
    if (cfg.fine_n < 2 || cfg.coarse_n < 2) raise(Errc::usage, "mesh sizes must be >= 2");
    if (cfg.fine_n % cfg.coarse_n != 0)
        raise(Errc::usage, "--coarse must divide --fine (nested meshes)");
    return cfg;
}

NonlinearModel make_model(const ExperimentConfig& cfg) {
    switch (cfg.problem) {
        case ModelFamily::monomial:
            return monomial_model(cfg.alpha, cfg.m,
                                  manufactured_rhs(ModelFamily::monomial, cfg.alpha, cfg.m));
        case ModelFamily::poisson_boltzmann:
            return poisson_boltzmann_model(
                cfg.alpha, manufactured_rhs(ModelFamily::poisson_boltzmann, cfg.alpha, 0));
        case ModelFamily::l1:
            return l1_model(cfg.alpha, l1_load());
    }
    raise(Errc::usage, "bad problem family");
}

std::string resolve_cache_dir(const std::string& out_dir) {
    if (const char* env = std::getenv("SCHWARZLIN_CACHE")) return env;
    return out_dir + "/refcache";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const StructuredMesh fine = build_uniform_mesh(cfg.fine_n);
    const StructuredMesh coarse = build_uniform_mesh(cfg.coarse_n);
    const NonlinearModel model = make_model(cfg);
    const DomainDecomposition dd =
        build_decomposition(fine, coarse, cfg.layers, cfg.levels == 2);

    const NodalFunction u_ref =
        reference_solution(fine, model, resolve_cache_dir(cfg.out_dir));
    const double ref_energy = energy(fine, model, u_ref);

    SchwarzConfig scfg;
    scfg.levels = cfg.levels;
    scfg.tau = cfg.tau;
    scfg.outer_iterations = cfg.iters;
    scfg.local_tol = cfg.tol;
    scfg.seed = cfg.seed;

    ExperimentResult result;
    result.schwarz = schwarz_solve(scfg, fine, model, dd, NodalFunction(fine));
    result.reference_energy = ref_energy;
    result.records = make_records(result.schwarz.energies, ref_energy);

    char name[160];
    if (cfg.problem == ModelFamily::monomial)
        std::snprintf(name, sizeof(name), "run-monomial-a%g-m%d-n%d-H%d-L%d-%dlvl.csv", cfg.alpha,
                      cfg.m, cfg.fine_n, cfg.coarse_n, cfg.layers, cfg.levels);
    else
        std::snprintf(name, sizeof(name), "run-%s-a%g-n%d-H%d-L%d-%dlvl.csv",
                      family_name(cfg.problem), cfg.alpha, cfg.fine_n, cfg.coarse_n, cfg.layers,
                      cfg.levels);
    result.csv_path = cfg.out_dir + "/" + name;
    emit_csv(result.records, result.csv_path);
    return result;
}

}  // namespace schwarzlin
