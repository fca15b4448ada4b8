#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/harness.hpp"

using namespace schwarzlin;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* kTmp = "/tmp/schwarzlin-harness-test";

struct TmpDir {
    TmpDir() {
        std::filesystem::remove_all(kTmp);
        std::filesystem::create_directories(kTmp);
    }
    ~TmpDir() { std::filesystem::remove_all(kTmp); }
};

}  // namespace

TEST_CASE("geometric mean rate") {
    SUBCASE("constant ratio is returned exactly") {
        std::vector<double> energies;
        const double ref = 2.0, rho = 0.75;
        double err = 1.0;
        for (int i = 0; i <= 30; ++i, err *= rho) energies.push_back(ref + err);
        const auto records = make_records(energies, ref);
        CHECK(geometric_mean_rate(records, 30) == doctest::Approx(rho).epsilon(1e-12));
    }
    SUBCASE("two steps with ratios 1/2 and 1/8 average to 1/4") {
        const double ref = 1.0;
        const auto records = make_records({ref + 1.0, ref + 0.5, ref + 0.0625}, ref);
        CHECK(geometric_mean_rate(records, 2) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("records below the noise floor are excluded") {
        const double ref = 1.0;
        const double floor = noise_floor(ref);
        CHECK(floor == doctest::Approx(1e3 * std::ldexp(1.0, -52)).epsilon(1e-12));
        // errors: 1e-3, 1e-4, 1e-5, then two below the floor
        const auto records = make_records(
            {ref + 1e-3, ref + 1e-4, ref + 1e-5, ref + 0.5 * floor, ref + 0.3 * floor}, ref);
        CHECK(geometric_mean_rate(records, 30) == doctest::Approx(0.01).epsilon(1e-10));
    }
    SUBCASE("insufficient data") {
        CHECK_THROWS_AS(geometric_mean_rate(make_records({1.5}, 1.0), 30), Error);
        const double ref = 1.0, floor = noise_floor(ref);
        CHECK_THROWS_AS(
            geometric_mean_rate(make_records({ref + 0.1 * floor, ref + 0.01 * floor}, ref), 30),
            Error);
    }
}

TEST_CASE("record construction") {
    const auto records = make_records({3.0, 2.0, 1.5}, 1.0);
    CHECK(records[0].abs_error == doctest::Approx(2.0));
    CHECK(records[0].rel_error == doctest::Approx(2.0));
    CHECK_FALSE(records[0].rate.has_value());
    CHECK(records[1].rate.value() == doctest::Approx(0.5));
    CHECK(records[2].rate.value() == doctest::Approx(0.5));
}

TEST_CASE("csv round trip and determinism") {
    TmpDir tmp;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<IterationRecord> records;
    for (int i = 0; i <= 12; ++i) {
        IterationRecord r;
        r.iter = i;
        r.energy = dist(rng) * std::pow(10.0, dist(rng) * 12);
        r.abs_error = dist(rng) * 1e-7;
        r.rel_error = dist(rng);
        if (i > 0) r.rate = std::fabs(dist(rng));
        records.push_back(r);
    }
    const std::string p1 = std::string(kTmp) + "/a.csv";
    const std::string p2 = std::string(kTmp) + "/b.csv";
    emit_csv(records, p1);
    emit_csv(records, p2);
    CHECK(slurp(p1) == slurp(p2));

    const auto back = parse_csv(p1);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].iter == records[i].iter);
        CHECK(back[i].energy == records[i].energy);          // 17 digits round-trip binary64
        CHECK(back[i].abs_error == records[i].abs_error);
        CHECK(back[i].rel_error == records[i].rel_error);
        CHECK(back[i].rate.has_value() == records[i].rate.has_value());
        if (back[i].rate) CHECK(*back[i].rate == *records[i].rate);
    }

    const std::string header = slurp(p1).substr(0, slurp(p1).find('\n'));
    CHECK(header == "iter,energy,abs_error,rel_error,rate");
}

TEST_CASE("svg decay plot") {
    TmpDir tmp;
    std::vector<IterationRecord> records;
    for (int i = 0; i <= 24; ++i) {
        IterationRecord r;
        r.iter = i;
        r.rel_error = std::pow(10.0, -0.5 * i);  // spans 1e0 .. 1e-12
        records.push_back(r);
    }
    const std::string p1 = std::string(kTmp) + "/a.svg";
    const std::string p2 = std::string(kTmp) + "/b.svg";
    emit_svg_decay_plot({{"series-a", records}}, p1);
    emit_svg_decay_plot({{"series-a", records}}, p2);
    const std::string svg = slurp(p1);
    CHECK(svg == slurp(p2));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("1e0<") != std::string::npos);    // decade ticks
    CHECK(svg.find("1e-12<") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("series-a") != std::string::npos);
}

TEST_CASE("config parsing") {
    SUBCASE("flags") {
        const ExperimentConfig cfg = parse_config(
            {"--problem", "pb", "--alpha", "1", "--fine", "64", "--coarse", "8", "--layers", "2",
             "--levels", "2"});
        CHECK(cfg.problem == ModelFamily::poisson_boltzmann);
        CHECK(cfg.alpha == 1.0);
        CHECK(cfg.fine_n == 64);
        CHECK(cfg.coarse_n == 8);
        CHECK(cfg.levels == 2);
        CHECK(cfg.tau == 0.0);  // resolved to the 1/5 default inside the solver
        CHECK(cfg.iters == 30);
        CHECK(cfg.tol == 1e-12);
    }
    SUBCASE("monomial requires m") {
        CHECK_THROWS_AS(parse_config({"--problem", "monomial", "--alpha", "1"}), Error);
        CHECK_NOTHROW(parse_config({"--problem", "monomial", "--alpha", "1", "--m", "3"}));
    }
    SUBCASE("flags override config-file values") {
        TmpDir tmp;
        const std::string file = std::string(kTmp) + "/run.cfg";
        {
            std::ofstream out(file);
            out << "# settings\nproblem = pb\nalpha = 2\niters = 30\n";
        }
        const ExperimentConfig cfg = parse_config({"--config", file, "--iters", "50"});
        CHECK(cfg.problem == ModelFamily::poisson_boltzmann);
        CHECK(cfg.alpha == 2.0);
        CHECK(cfg.iters == 50);
    }
    SUBCASE("unknown config keys are rejected") {
        TmpDir tmp;
        const std::string file = std::string(kTmp) + "/bad.cfg";
        {
            std::ofstream out(file);
            out << "problem = pb\nwibble = 3\n";
        }
        CHECK_THROWS_AS(parse_config({"--config", file}), Error);
    }
    SUBCASE("inconsistent mesh parameters") {
        CHECK_THROWS_AS(
            parse_config({"--problem", "pb", "--fine", "12", "--coarse", "5"}), Error);
        CHECK_THROWS_AS(parse_config({"--problem", "pb", "--levels", "3"}), Error);
        CHECK_THROWS_AS(parse_config({"--problem", "nope"}), Error);
    }
}

TEST_CASE("run_experiment record invariants") {
    TmpDir tmp;
    ExperimentConfig cfg;
    cfg.problem = ModelFamily::monomial;
    cfg.alpha = 1.0;
    cfg.m = 3;
    cfg.fine_n = 16;
    cfg.coarse_n = 4;
    cfg.layers = 1;
    cfg.levels = 2;
    cfg.iters = 8;
    cfg.out_dir = kTmp;
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.records.size() == 9);
    const double floor = noise_floor(res.reference_energy);
    for (const IterationRecord& r : res.records) {
        CHECK(r.abs_error >= -1e-12);
        if (r.rate && r.abs_error >= floor) {
            CHECK(*r.rate >= 0.0);
            CHECK(*r.rate <= 1.0 + 1e-9);
        }
    }
    CHECK(std::filesystem::exists(res.csv_path));
    // the reference cache landed under <out>/refcache
    CHECK(std::filesystem::exists(std::string(kTmp) + "/refcache"));
}

TEST_CASE("mutation sanity: a corrupted gradient fails the fd check") {
    const StructuredMesh mesh(8);
    const NonlinearModel model =
        monomial_model(10.0, 3, manufactured_rhs(ModelFamily::monomial, 10.0, 3));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    NodalFunction u(mesh);
    std::vector<double> dir(static_cast<std::size_t>(mesh.interior_count()));
    for (int j = 1; j < 8; ++j)
        for (int i = 1; i < 8; ++i) {
            u.at(i, j) = dist(rng);
            dir[mesh.interior_index(i, j)] = dist(rng);
        }
    std::vector<double> grad = gradient(mesh, model, u);
    CHECK(fd_gradient_deviation(mesh, model, u, dir, 1e-5, grad) <= 1e-8);
    grad[10] = -grad[10];  // injected sign error
    CHECK(fd_gradient_deviation(mesh, model, u, dir, 1e-5, grad) > 1e-6);
}

TEST_CASE("order fit helper") {
    // err = C h^p gives back p
    std::vector<double> hs = {0.1, 0.05, 0.025}, errs;
    for (double h : hs) errs.push_back(3.0 * std::pow(h, 1.7));
    CHECK(fit_order(hs, errs) == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("check suite selectors") {
    const CheckReport prox = check_suite("prox", 1);
    CHECK(prox.all_pass);
    CHECK(prox.outcomes.size() == 2);
    CHECK_THROWS_AS(check_suite("no-such-check", 0), Error);
}
