#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/harness.hpp"

namespace schwarzlin {

namespace {

// Published geometric-average convergence rates, 30 iterations, panels
// (a) one-level h=2^-5 H=2^-2, (b) two-level h=2^-5 H=2^-2,
// (c) one-level h=2^-6 H=2^-3, (d) two-level h=2^-6 H=2^-3; delta = 2h.

// monomial problem: rows m in {3,6,9,12}, columns alpha in {1e0,1e1,1e2,1e3}
const double kMonomial[4][4][4] = {
    {{0.9183, 0.9109, 0.8391, 0.6226},
     {0.9191, 0.9190, 0.9184, 0.9114},
     {0.9191, 0.9191, 0.9191, 0.9190},
     {0.9191, 0.9191, 0.9191, 0.9191}},
    {{0.7134, 0.7036, 0.6534, 0.5742},
     {0.7146, 0.7144, 0.7126, 0.6988},
     {0.7146, 0.7146, 0.7145, 0.7143},
     {0.7146, 0.7146, 0.7146, 0.7146}},
    {{0.9773, 0.9757, 0.9568, 0.7950},
     {0.9775, 0.9774, 0.9774, 0.9766},
     {0.9775, 0.9775, 0.9775, 0.9774},
     {0.9775, 0.9775, 0.9775, 0.9775}},
    {{0.6753, 0.6712, 0.6477, 0.5917},
     {0.6757, 0.6757, 0.6751, 0.6708},
     {0.6757, 0.6757, 0.6757, 0.6757},
     {0.6757, 0.6757, 0.6757, 0.6757}}};

// Poisson-Boltzmann: columns alpha in {1e-2,1e-1,1e0,1e1}
const double kPB[4][4] = {{0.8112, 0.8106, 0.8046, 0.6831},
                          {0.6705, 0.6702, 0.6665, 0.6167},
                          {0.9433, 0.9430, 0.9407, 0.8905},
                          {0.6574, 0.6572, 0.6554, 0.6277}};

// max Newton iterations over the local and coarse solves, same grid as kPB
const double kNewton[4][4] = {{2, 2, 2, 4}, {2, 2, 3, 5}, {2, 2, 2, 3}, {2, 2, 3, 6}};

// L1-penalized problem: columns alpha in {10,20,30,40}
const double kL1[4][4] = {{0.9193, 0.9192, 0.9192, 0.9191},
                          {0.7148, 0.7148, 0.7148, 0.7148},
                          {0.9777, 0.9777, 0.9776, 0.9775},
                          {0.6755, 0.6755, 0.6755, 0.6755}};

const int kMonomialM[4] = {3, 6, 9, 12};
const double kMonomialAlpha[4] = {1e0, 1e1, 1e2, 1e3};
const double kPBAlpha[4] = {1e-2, 1e-1, 1e0, 1e1};
const double kL1Alpha[4] = {10, 20, 30, 40};

struct PanelGeometry {
    int fine, coarse, levels;
};
const PanelGeometry kPanels[4] = {{32, 4, 1}, {32, 4, 2}, {64, 8, 1}, {64, 8, 2}};

ExperimentConfig cell_config(ModelFamily family, int panel, double alpha, int m,
                             const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.problem = family;
    cfg.alpha = alpha;
    cfg.m = m;
    cfg.fine_n = kPanels[panel].fine;
    cfg.coarse_n = kPanels[panel].coarse;
    // The published Poisson-Boltzmann grids were run with delta = 4h (their
    // small-alpha columns coincide with the linear-problem rates at that
    // overlap, and all 32 published numbers match it to 1e-4); the monomial
    // and l1 grids use delta = 2h.
    cfg.layers = family == ModelFamily::poisson_boltzmann ? 4 : 2;
    cfg.levels = kPanels[panel].levels;
    cfg.iters = 30;
    cfg.out_dir = out_dir;
    return cfg;
}

void append_cell_text(std::string& text, const TableCell& cell, double tol, bool integer_valued) {
    char buf[160];
    if (integer_valued)
        std::snprintf(buf, sizeof(buf), "  panel (%c)%s alpha=%-6g: computed %2d  published %2d  dev %+d%s\n",
                      cell.panel, cell.m ? (" m=" + std::to_string(cell.m)).c_str() : "",
                      cell.alpha, static_cast<int>(cell.computed),
                      static_cast<int>(cell.expected),
                      static_cast<int>(cell.computed - cell.expected),
                      cell.within ? "" : "  <-- outside tolerance");
    else
        std::snprintf(buf, sizeof(buf),
                      "  panel (%c)%s alpha=%-6g: rate %.4f  published %.4f  dev %+.4f%s\n",
                      cell.panel, cell.m ? (" m=" + std::to_string(cell.m)).c_str() : "",
                      cell.alpha, cell.computed, cell.expected, cell.computed - cell.expected,
                      cell.within ? "" : "  <-- outside tolerance");
    text += buf;
    (void)tol;
}

void write_table_csv(const TableResult& table, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream out(out_dir + "/table-" + table.id + ".csv", std::ios::binary);
    if (!out) raise(Errc::io, "cannot write table csv");
    out << "panel,m,alpha,computed,published,deviation\n";
    char buf[200];
    for (const TableCell& c : table.cells) {
        std::snprintf(buf, sizeof(buf), "%c,%d,%.16e,%.16e,%.16e,%.16e\n", c.panel, c.m, c.alpha,
                      c.computed, c.expected, c.computed - c.expected);
        out << buf;
    }
}

}  // namespace

TableResult reproduce_table(const std::string& id, const std::string& out_dir) {
    TableResult table;
    table.id = id;
    table.all_within = true;

    const bool newton_table = id == "newton";
    table.tolerance = newton_table ? 1.0 : 0.05;

    auto run_cell = [&](int panel, double alpha, int m, double expected) {
        ModelFamily family = ModelFamily::monomial;
        if (id == "pb" || id == "newton") family = ModelFamily::poisson_boltzmann;
        if (id == "l1") family = ModelFamily::l1;
        const ExperimentConfig cfg = cell_config(family, panel, alpha, m, out_dir);
        const ExperimentResult res = run_experiment(cfg);
        TableCell cell;
        cell.panel = static_cast<char>('a' + panel);
        cell.m = m;
        cell.alpha = alpha;
        cell.expected = expected;
        cell.computed = newton_table ? res.schwarz.max_inner_iterations
                                     : geometric_mean_rate(res.records, cfg.iters);
        cell.within = std::fabs(cell.computed - cell.expected) <= table.tolerance;
        table.all_within = table.all_within && cell.within;
        table.cells.push_back(cell);
        append_cell_text(table.text, cell, table.tolerance, newton_table);
    };

    if (id == "monomial") {
        for (int panel = 0; panel < 4; ++panel)
            for (int row = 0; row < 4; ++row)
                for (int col = 0; col < 4; ++col)
                    run_cell(panel, kMonomialAlpha[col], kMonomialM[row],
                             kMonomial[panel][row][col]);
    } else if (id == "pb" || id == "newton") {
        const auto& expect = newton_table ? kNewton : kPB;
        for (int panel = 0; panel < 4; ++panel)
            for (int col = 0; col < 4; ++col) run_cell(panel, kPBAlpha[col], 0, expect[panel][col]);
    } else if (id == "l1") {
        for (int panel = 0; panel < 4; ++panel)
            for (int col = 0; col < 4; ++col) run_cell(panel, kL1Alpha[col], 0, kL1[panel][col]);
    } else {
        raise(Errc::usage, "unknown table '" + id + "' (expected monomial|pb|newton|l1)");
    }

    write_table_csv(table, out_dir);
    return table;
}

void run_figure(const std::string& id, const std::string& out_dir, bool large) {
    ModelFamily family;
    double alpha;
    int m = 0;
    if (id == "monomial") {
        family = ModelFamily::monomial;
        alpha = 10.0;
        m = 3;
    } else if (id == "pb") {
        family = ModelFamily::poisson_boltzmann;
        alpha = 1.0;
    } else if (id == "l1") {
        family = ModelFamily::l1;
        alpha = 10.0;
    } else {
        raise(Errc::usage, "unknown figure '" + id + "' (expected monomial|pb|l1)");
    }

    std::vector<int> fines = {32, 64, 128};
    if (large) {
        fines.push_back(256);
        fines.push_back(512);
    }

    const int ratios[2] = {8, 16};
    const int deltas[2] = {2, 4};
    for (int levels = 1; levels <= 2; ++levels) {
        for (int ratio : ratios) {
            for (int dlt : deltas) {
                std::vector<PlotSeries> series;
                for (int fine : fines) {
                    ExperimentConfig cfg;
                    cfg.problem = family;
                    cfg.alpha = alpha;
                    cfg.m = m;
                    cfg.fine_n = fine;
                    cfg.coarse_n = fine / ratio;
                    cfg.layers = dlt;
                    cfg.levels = levels;
                    cfg.iters = 100;
                    cfg.out_dir = out_dir;
                    const ExperimentResult res = run_experiment(cfg);
                    char label[64];
                    std::snprintf(label, sizeof(label), "h = 1/%d", fine);
                    series.push_back({label, res.records});
                }
                char path[200];
                std::snprintf(path, sizeof(path), "%s/figure-%s-%dlvl-ratio%d-delta%dh.svg",
                              out_dir.c_str(), id.c_str(), levels, ratio, dlt);
                emit_svg_decay_plot(series, path);
            }
        }
    }
}

}  // namespace schwarzlin
