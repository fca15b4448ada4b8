#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schwarzlin/solvers.hpp"

namespace schwarzlin {

/// One outer iteration of a run, as reported in the tables and figures.
struct IterationRecord {
    int iter = 0;
    double energy = 0.0;
    double abs_error = 0.0;               // E(u^(n)) - E(u_ref)
    double rel_error = 0.0;               // abs_error / |E(u_ref)|
    std::optional<double> rate;           // abs_error_n / abs_error_{n-1}
};

struct ExperimentConfig {
    ModelFamily problem = ModelFamily::monomial;
    double alpha = 1.0;
    int m = 0;  // required for the monomial family
    int fine_n = 32;
    int coarse_n = 4;
    int layers = 2;
    int levels = 1;
    double tau = 0.0;  // 0 = default (1/4 one-level, 1/5 two-level)
    int iters = 30;
    double tol = 1e-12;
    std::string out_dir = "out";
    bool large = false;
    unsigned seed = 0;
};

/// Parse CLI flags (optionally pulling defaults from a `key = value` config
/// file given via --config); flags override file values, unknown keys are
/// rejected. Throws Error(usage) on bad input.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Resolved model of a config (manufactured load for the smooth families,
/// the fixed explicit load for l1).
NonlinearModel make_model(const ExperimentConfig& cfg);

/// Reference cache directory: SCHWARZLIN_CACHE env var if set, else
/// <out_dir>/refcache.
std::string resolve_cache_dir(const std::string& out_dir);

struct ExperimentResult {
    std::vector<IterationRecord> records;
    SchwarzResult schwarz;
    double reference_energy = 0.0;
    std::string csv_path;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<IterationRecord> make_records(const std::vector<double>& energies, double ref_energy);

/// Errors below 1e3 ulp of |E_ref| are rounding noise and excluded from rates.
double noise_floor(double ref_energy);

/// (abs_error_k / abs_error_0)^(1/k) over the first k <= iters steps above
/// the noise floor; warns when fewer than iters are usable, errors with
/// insufficient_data when fewer than two records are.
double geometric_mean_rate(const std::vector<IterationRecord>& records, int iters = 30);

void emit_csv(const std::vector<IterationRecord>& records, const std::string& path);
std::vector<IterationRecord> parse_csv(const std::string& path);

struct PlotSeries {
    std::string label;
    std::vector<IterationRecord> records;
};

/// Log-scale decay chart of rel_error vs iteration, one polyline per series;
/// byte-deterministic for identical input.
void emit_svg_decay_plot(const std::vector<PlotSeries>& series, const std::string& path);

// ---------------------------------------------------------------------------
// table and figure reproduction

struct TableCell {
    char panel = 'a';
    int m = 0;          // monomial row (0 elsewhere)
    double alpha = 0.0;
    double computed = 0.0;
    double expected = 0.0;
    bool within = false;
};

struct TableResult {
    std::string id;
    double tolerance = 0.0;
    std::vector<TableCell> cells;
    bool all_within = false;
    std::string text;  // aligned human-readable rendering
};

/// id: monomial | pb | newton | l1. Runs the full grid of the corresponding
/// table, compares against the published values, writes <out>/table-<id>.csv.
TableResult reproduce_table(const std::string& id, const std::string& out_dir);

/// id: monomial | pb | l1. Decay figures over a sweep of mesh sizes
/// (h = 2^-5..2^-7, plus 2^-8/2^-9 when large). Writes SVGs and CSVs.
void run_figure(const std::string& id, const std::string& out_dir, bool large);

// ---------------------------------------------------------------------------
// property checks

struct CheckOutcome {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckOutcome> outcomes;
    bool all_pass = true;
};

/// Run the named property checks ("all" or a name prefix: pou, reconstruction,
/// jh, fd, convexity, strengthened, prox, orders, lipschitz).
CheckReport check_suite(const std::string& selector, unsigned seed = 0);

/// |central difference of E along direction - <grad, direction>|; exposed so
/// the mutation test can feed a corrupted gradient.
double fd_gradient_deviation(const StructuredMesh& mesh, const NonlinearModel& model,
                             const NodalFunction& u, const std::vector<double>& direction,
                             double eps, const std::vector<double>& grad);

/// Least-squares slope of log(err) against log(h).
double fit_order(const std::vector<double>& hs, const std::vector<double>& errs);

}  // namespace schwarzlin
