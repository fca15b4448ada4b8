#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/fem.hpp"
#include "schwarzlin/kernels.hpp"

using namespace schwarzlin;

namespace {

NodalFunction random_sh(const StructuredMesh& mesh, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    NodalFunction u(mesh);
    for (int j = 1; j < mesh.n(); ++j)
        for (int i = 1; i < mesh.n(); ++i) u.at(i, j) = dist(rng);
    return u;
}

// independent element-loop evaluation of a(u,u): gradients of the P1 hat
// functions recomputed from scratch on each triangle
double brute_force_dirichlet(const StructuredMesh& mesh, const NodalFunction& u) {
    const int n = mesh.n();
    const double h = mesh.h();
    double acc = 0.0;
    for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) {
            const double uA = u.at(p, q), uB = u.at(p + 1, q), uC = u.at(p + 1, q + 1),
                         uD = u.at(p, q + 1);
            // lower triangle: grad = ((uB-uA)/h, (uC-uB)/h); area h^2/2
            double gx = (uB - uA) / h, gy = (uC - uB) / h;
            acc += 0.5 * h * h * (gx * gx + gy * gy);
            // upper triangle: grad = ((uC-uD)/h, (uD-uA)/h)
            gx = (uC - uD) / h;
            gy = (uD - uA) / h;
            acc += 0.5 * h * h * (gx * gx + gy * gy);
        }
    return acc;
}

}  // namespace

TEST_CASE("stiffness entries match the hand-assembled stencil") {
    for (int n : {4, 9, 32}) {
        const StructuredMesh mesh(n);
        const SparseSymmetricOperator A = assemble_stiffness(mesh);
        const int mid = mesh.interior_index(n / 2, n / 2);
        CHECK(A.entry(mid, mid) == doctest::Approx(4.0));  // independent of h
        CHECK(A.entry(mid, mid + 1) == doctest::Approx(-1.0));
        CHECK(A.entry(mid, mid - 1) == doctest::Approx(-1.0));
        CHECK(A.entry(mid, mid + (n - 1)) == doctest::Approx(-1.0));
        CHECK(A.entry(mid, mid + n) == 0.0);  // diagonal neighbor
        CHECK(A.entry(mid, mid - n) == 0.0);
        CHECK(A.entry(mid, mid + 2) == 0.0);
    }
}

TEST_CASE("A applied to zero is zero") {
    const StructuredMesh mesh(8);
    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    std::vector<double> x(static_cast<std::size_t>(A.dim()), 0.0), y(x.size(), 1.0);
    A.apply(x.data(), y.data());
    for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("operator quadratic form equals brute-force element integration") {
    std::mt19937_64 rng(3);
    for (int n : {4, 16, 33}) {
        const StructuredMesh mesh(n);
        const SparseSymmetricOperator A = assemble_stiffness(mesh);
        const NodalFunction u = random_sh(mesh, rng, 1.0);
        const std::vector<double> ui = gather_interior(mesh, u);
        CHECK(A.quad_form(ui.data()) ==
              doctest::Approx(brute_force_dirichlet(mesh, u)).epsilon(1e-12));
    }
}

TEST_CASE("banded factorization solves against a known solution") {
    const StructuredMesh mesh(12);
    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x0(static_cast<std::size_t>(A.dim())), b(x0.size()), x(x0.size());
    for (double& v : x0) v = dist(rng);
    A.apply(x0.data(), b.data());
    A.factor().solve(b.data(), x.data());
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(x[k] == doctest::Approx(x0[k]).epsilon(1e-10));
}

TEST_CASE("energy reference values") {
    const StructuredMesh mesh(8);
    NodalFunction zero(mesh);

    const NonlinearModel mono = monomial_model(7.0, 3, zero_field());
    CHECK(energy(mesh, mono, zero) == 0.0);

    const NonlinearModel pb = poisson_boltzmann_model(1.0, zero_field());
    CHECK(energy(mesh, pb, zero) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pure Laplace energy is half the quadratic form") {
    const StructuredMesh mesh(4);
    const NonlinearModel laplace = monomial_model(0.0, 2, zero_field());
    NodalFunction u = interpolate(mesh, [](double x, double y) {
        return x * (1.0 - x) * std::sin(M_PI * y);
    });
    for (int i = 0; i <= 4; ++i) u.at(i, 4) = 0.0;  // scrub the sin(pi) residue
    CHECK(energy(mesh, laplace, u) ==
          doctest::Approx(0.5 * brute_force_dirichlet(mesh, u)).epsilon(1e-12));
}

TEST_CASE("gradient of the pure Laplace problem is Au - w o g") {
    const StructuredMesh mesh(6);
    const ScalarField g = [](double x, double y) { return std::cos(x + 2.0 * y); };
    const NonlinearModel laplace = monomial_model(0.0, 2, g);
    std::mt19937_64 rng(11);
    const NodalFunction u = random_sh(mesh, rng, 1.0);
    const std::vector<double> ui = gather_interior(mesh, u);

    const std::vector<double> grad = gradient(mesh, laplace, u);
    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    std::vector<double> expect(ui.size());
    A.apply(ui.data(), expect.data());
    const std::vector<double> w = mesh.nodal_weights();
    for (int j = 1; j < 6; ++j)
        for (int i = 1; i < 6; ++i) {
            const Vec2 p = mesh.coords(i, j);
            expect[mesh.interior_index(i, j)] -= w[mesh.vertex_id(i, j)] * g(p.x, p.y);
        }
    for (std::size_t k = 0; k < grad.size(); ++k)
        CHECK(grad[k] == doctest::Approx(expect[k]).epsilon(1e-13));
}

TEST_CASE("gradient matches central differences of the energy") {
    const StructuredMesh mesh(8);
    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    std::mt19937_64 rng(17);
    const NonlinearModel models[] = {
        monomial_model(10.0, 3, manufactured_rhs(ModelFamily::monomial, 10.0, 3)),
        poisson_boltzmann_model(1.0, manufactured_rhs(ModelFamily::poisson_boltzmann, 1.0, 0))};
    for (const NonlinearModel& model : models) {
        const NodalFunction u = random_sh(mesh, rng, 0.3);
        const NodalFunction v = random_sh(mesh, rng, 1.0);
        const std::vector<double> vi = gather_interior(mesh, v);
        const std::vector<double> g = gradient(mesh, model, u);
        const double inner = kernels::dot(g.data(), vi.data(), vi.size());
        for (double eps : {1e-4, 1e-5}) {
            NodalFunction up = u, um = u;
            for (int j = 1; j < 8; ++j)
                for (int i = 1; i < 8; ++i) {
                    up.at(i, j) += eps * v.at(i, j);
                    um.at(i, j) -= eps * v.at(i, j);
                }
            const double fd = (energy(mesh, model, up, A) - energy(mesh, model, um, A)) / (2 * eps);
            CHECK(std::fabs(fd - inner) <= (eps == 1e-4 ? 1e-6 : 1e-8) * (1.0 + std::fabs(inner)));
        }
    }
}

TEST_CASE("hessian structure for the quadratic monomial and PB at zero") {
    const StructuredMesh mesh(8);
    const std::vector<double> w = mesh.nodal_weights();
    const SparseSymmetricOperator A = assemble_stiffness(mesh);

    const NonlinearModel m2 = monomial_model(3.0, 2, zero_field());
    std::mt19937_64 rng(23);
    const NodalFunction u = random_sh(mesh, rng, 0.5);
    const SparseSymmetricOperator H = hessian(mesh, m2, u);
    for (int j = 1; j < 8; ++j)
        for (int i = 1; i < 8; ++i) {
            const int d = mesh.interior_index(i, j);
            CHECK(H.entry(d, d) - A.entry(d, d) ==
                  doctest::Approx(3.0 * w[mesh.vertex_id(i, j)]).epsilon(1e-13));
        }

    const NonlinearModel pb = poisson_boltzmann_model(1.0, zero_field());
    NodalFunction zero(mesh);
    const SparseSymmetricOperator Hpb = hessian(mesh, pb, zero);
    for (int j = 1; j < 8; ++j)
        for (int i = 1; i < 8; ++i) {
            const int d = mesh.interior_index(i, j);
            CHECK(Hpb.entry(d, d) - A.entry(d, d) ==
                  doctest::Approx(w[mesh.vertex_id(i, j)]).epsilon(1e-13));  // cosh(0) = 1
        }
}

TEST_CASE("hessian times direction matches central differences of the gradient") {
    const StructuredMesh mesh(8);
    std::mt19937_64 rng(29);
    const NonlinearModel model =
        monomial_model(10.0, 4, manufactured_rhs(ModelFamily::monomial, 10.0, 4));
    const NodalFunction u = random_sh(mesh, rng, 0.3);
    const NodalFunction v = random_sh(mesh, rng, 1.0);
    const std::vector<double> vi = gather_interior(mesh, v);
    const SparseSymmetricOperator H = hessian(mesh, model, u);
    std::vector<double> Hv(vi.size());
    H.apply(vi.data(), Hv.data());
    const double eps = 1e-5;
    NodalFunction up = u, um = u;
    for (int j = 1; j < 8; ++j)
        for (int i = 1; i < 8; ++i) {
            up.at(i, j) += eps * v.at(i, j);
            um.at(i, j) -= eps * v.at(i, j);
        }
    const std::vector<double> gp = gradient(mesh, model, up);
    const std::vector<double> gm = gradient(mesh, model, um);
    for (std::size_t k = 0; k < Hv.size(); ++k)
        CHECK(std::fabs((gp[k] - gm[k]) / (2 * eps) - Hv[k]) <= 1e-7);
}

TEST_CASE("l1 model rejects gradient and hessian requests") {
    const StructuredMesh mesh(4);
    const NonlinearModel l1 = l1_model(10.0, l1_load());
    NodalFunction zero(mesh);
    CHECK_THROWS_AS(gradient(mesh, l1, zero), Error);
    CHECK_THROWS_AS(hessian(mesh, l1, zero), Error);
}

TEST_CASE("interpolation") {
    const StructuredMesh mesh(32);
    const NodalFunction u = interpolate(mesh, [](double x, double y) {
        return x * (1.0 - x) * std::sin(M_PI * y);
    });
    for (int i = 0; i <= 32; ++i) {
        CHECK(std::fabs(u.at(i, 0)) <= 1e-16);
        CHECK(std::fabs(u.at(i, 32)) <= 1e-15);
        CHECK(u.at(0, i) == 0.0);
        CHECK(u.at(32, i) == 0.0);
    }

    // P1 reproduces affines: the interpolation error vanishes identically
    const ScalarField affine = [](double x, double y) { return 2.0 - 3.0 * x + 0.5 * y; };
    const StructuredMesh small(5);
    CHECK(l1_error(small, interpolate(small, affine), affine) <= 1e-15);
    CHECK(h1_error(small, interpolate(small, affine), affine,
                   [](double, double) { return Vec2{-3.0, 0.5}; }) <= 1e-13);
}

TEST_CASE("interpolation error in L1 drops by 4 when h halves") {
    const ScalarField v = [](double x, double y) { return std::cos(3.0 * x) * std::cos(3.0 * y); };
    const StructuredMesh m1(16), m2(32);
    const double e1 = l1_error(m1, interpolate(m1, v), v);
    const double e2 = l1_error(m2, interpolate(m2, v), v);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.08));
}

TEST_CASE("h1 error is symmetric for P1-exact data") {
    const StructuredMesh mesh(6);
    const ScalarField f = [](double x, double y) { return 1.0 + x - 2.0 * y; };
    const ScalarField g = [](double x, double y) { return -0.5 + 2.0 * x + y; };
    const VectorField df = [](double, double) { return Vec2{1.0, -2.0}; };
    const VectorField dg = [](double, double) { return Vec2{2.0, 1.0}; };
    const double e1 = h1_error(mesh, interpolate(mesh, f), g, dg);
    const double e2 = h1_error(mesh, interpolate(mesh, g), f, df);
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-13));
}

TEST_CASE("energy overflow identifies the vertex") {
    const StructuredMesh mesh(4);
    const NonlinearModel pb = poisson_boltzmann_model(1.0, zero_field());
    NodalFunction u(mesh);
    u.at(2, 2) = 800.0;  // cosh(800) overflows
    try {
        energy(mesh, pb, u);
        FAIL("expected numeric_overflow");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::numeric_overflow);
        CHECK(std::string(e.what()).find("vertex") != std::string::npos);
    }
}

TEST_CASE("strong convexity samples") {
    const StructuredMesh mesh(8);
    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    const NonlinearModel model =
        monomial_model(10.0, 3, manufactured_rhs(ModelFamily::monomial, 10.0, 3));
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> tdist(0.1, 0.9);
    for (int rep = 0; rep < 25; ++rep) {
        const NodalFunction u = random_sh(mesh, rng, 0.5);
        const NodalFunction v = random_sh(mesh, rng, 0.5);
        const double t = tdist(rng);
        NodalFunction mix(mesh);
        std::vector<double> diff(static_cast<std::size_t>(mesh.interior_count()));
        for (int j = 1; j < 8; ++j)
            for (int i = 1; i < 8; ++i) {
                mix.at(i, j) = t * u.at(i, j) + (1 - t) * v.at(i, j);
                diff[mesh.interior_index(i, j)] = u.at(i, j) - v.at(i, j);
            }
        const double lhs = energy(mesh, model, mix, A);
        const double rhs = t * energy(mesh, model, u, A) + (1 - t) * energy(mesh, model, v, A) -
                           0.5 * t * (1 - t) * A.quad_form(diff.data());
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("separable term batch paths agree with the pointwise model") {
    const StructuredMesh mesh(6);
    std::mt19937_64 rng(37);
    const NonlinearModel models[] = {
        monomial_model(5.0, 3, manufactured_rhs(ModelFamily::monomial, 5.0, 3)),
        poisson_boltzmann_model(2.0, manufactured_rhs(ModelFamily::poisson_boltzmann, 2.0, 0)),
        l1_model(10.0, l1_load())};
    for (const NonlinearModel& model : models) {
        const SeparableTerm term = full_term(mesh, model);
        const NodalFunction u = random_sh(mesh, rng, 0.4);
        double expect = 0.0;
        const std::vector<double> w = mesh.nodal_weights();
        for (int j = 0; j <= 6; ++j)
            for (int i = 0; i <= 6; ++i)
                expect += w[mesh.vertex_id(i, j)] * model.phi(mesh.coords(i, j), u.at(i, j));
        CHECK(term.sum(u.values.data()) == doctest::Approx(expect).epsilon(1e-12));

        // the difference path agrees with the plain difference of sums
        const NodalFunction d = random_sh(mesh, rng, 0.2);
        const double t = 0.37;
        const double delta = term.sum_line_delta(u.values.data(), d.values.data(), t);
        const double direct =
            term.sum_line(u.values.data(), d.values.data(), t) - term.sum(u.values.data());
        CHECK(delta == doctest::Approx(direct).epsilon(1e-9));
    }
}
