#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "schwarzlin/decomp.hpp"
#include "schwarzlin/errors.hpp"

using namespace schwarzlin;

namespace {

NodalFunction random_sh(const StructuredMesh& mesh, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    NodalFunction u(mesh);
    for (int j = 1; j < mesh.n(); ++j)
        for (int i = 1; i < mesh.n(); ++i) u.at(i, j) = dist(rng);
    return u;
}

}  // namespace

TEST_CASE("decomposition geometry") {
    const StructuredMesh fine(32), coarse(4);
    const DomainDecomposition dd = build_decomposition(fine, coarse, 2, false);
    CHECK(dd.count() == 16);
    CHECK(dd.delta() == doctest::Approx(2.0 / 32.0));
    CHECK_FALSE(dd.two_level());

    // corner subdomain clipped at the boundary still excludes boundary dofs
    const Subdomain& corner = dd.subdomains[0];
    CHECK(corner.cover.x0 == 0);
    CHECK(corner.dofs.x0 == 1);
    CHECK(corner.dofs.y0 == 1);
    // interior subdomain: core cell [8,16]^2 dilated by 2 layers
    const Subdomain& inner = dd.subdomains[5];  // cell (1,1)
    CHECK(inner.cover.x0 == 6);
    CHECK(inner.cover.x1 == 18);
    CHECK(inner.dofs.x0 == 7);
    CHECK(inner.dofs.x1 == 17);

    // every interior dof is covered by at least one and at most four dof sets
    for (int j = 1; j < 32; ++j)
        for (int i = 1; i < 32; ++i) {
            int owners = 0;
            for (const Subdomain& sd : dd.subdomains)
                if (sd.dofs.contains(i, j)) ++owners;
            CHECK(owners >= 1);
            CHECK(owners <= 4);
        }
}

TEST_CASE("decomposition preconditions") {
    const StructuredMesh fine(32), coarse(4), c5(5);
    CHECK_THROWS_AS(build_decomposition(fine, c5, 2, false), Error);   // 5 does not divide 32
    CHECK_THROWS_AS(build_decomposition(fine, coarse, 0, false), Error);
    CHECK_THROWS_AS(build_decomposition(fine, coarse, 8, false), Error);  // delta = core width
    try {
        build_decomposition(fine, coarse, 5, false);  // 2*5 > 8: same-color overlap
        FAIL("expected coloring_violation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::coloring_violation);
    }
    // 2 * layers == ratio is the widest admissible overlap
    CHECK_NOTHROW(build_decomposition(fine, coarse, 4, false));
}

TEST_CASE("coloring is a 2x2 checkerboard with verified disjointness") {
    const StructuredMesh fine(32), coarse(4);
    const DomainDecomposition dd = build_decomposition(fine, coarse, 2, false);
    std::set<int> used;
    for (const Subdomain& sd : dd.subdomains) {
        CHECK(sd.color == (sd.cell_a % 2) + 2 * (sd.cell_b % 2));
        used.insert(sd.color);
    }
    CHECK(used.size() == 4);
    for (std::size_t k = 0; k < dd.subdomains.size(); ++k)
        for (std::size_t l = k + 1; l < dd.subdomains.size(); ++l)
            if (dd.subdomains[k].color == dd.subdomains[l].color)
                CHECK_FALSE(dd.subdomains[k].cover.intersects(dd.subdomains[l].cover));

    const StructuredMesh c2(2);
    const DomainDecomposition small = build_decomposition(fine, c2, 2, false);
    std::set<int> small_used;
    for (const Subdomain& sd : small.subdomains) small_used.insert(sd.color);
    CHECK(small_used.size() <= 4);

    CHECK(single_subdomain_decomposition(fine).subdomains[0].color == 0);
}

TEST_CASE("partition of unity identities") {
    const StructuredMesh fine(32), coarse(4);
    DomainDecomposition dd = build_decomposition(fine, coarse, 2, false);
    build_partition_of_unity(dd);

    // vertex deep inside a core away from every overlap band
    const Subdomain& inner = dd.subdomains[5];  // cell (1,1), core [8,16]^2
    CHECK(inner.theta_at(12, 12) == 1.0);
    for (std::size_t k = 0; k < dd.subdomains.size(); ++k)
        if (k != 5) CHECK(dd.subdomains[k].theta_at(12, 12) == 0.0);

    // sum to one at every vertex of the closed domain
    for (int j = 0; j <= 32; ++j)
        for (int i = 0; i <= 32; ++i) {
            double sum = 0.0;
            for (const Subdomain& sd : dd.subdomains) sum += sd.theta_at(i, j);
            CHECK(std::fabs(sum - 1.0) <= 1e-15);
        }

    // midpoint of the two-layer overlap band between two subdomains
    CHECK(dd.subdomains[4].theta_at(8, 12) == doctest::Approx(0.5));
    CHECK(dd.subdomains[5].theta_at(8, 12) == doctest::Approx(0.5));
}

TEST_CASE("restriction and extension") {
    const StructuredMesh fine(16), coarse(4);
    const DomainDecomposition dd = build_decomposition(fine, coarse, 1, false);
    const Subdomain& sd = dd.subdomains[9];
    std::mt19937_64 rng(7);

    const std::vector<double> zero_local(static_cast<std::size_t>(sd.dof_count()), 0.0);
    const NodalFunction zext = extend_by_zero(fine, sd, zero_local);
    for (double v : zext.values) CHECK(v == 0.0);

    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> local(static_cast<std::size_t>(sd.dof_count()));
    for (double& v : local) v = dist(rng);
    CHECK(restrict_to(sd, extend_by_zero(fine, sd, local)) == local);

    // extend(restrict(u)) != u for u supported outside the subdomain
    NodalFunction u = random_sh(fine, rng, 1.0);
    const NodalFunction er = extend_by_zero(fine, sd, restrict_to(sd, u));
    bool differs = false;
    for (std::size_t v = 0; v < u.values.size(); ++v)
        if (er.values[v] != u.values[v]) differs = true;
    CHECK(differs);

    std::vector<double> wrong(static_cast<std::size_t>(sd.dof_count() + 1), 0.0);
    CHECK_THROWS_AS(extend_by_zero(fine, sd, wrong), Error);
}

TEST_CASE("prolongation") {
    const StructuredMesh fine(32), coarse(4);
    const DomainDecomposition dd = build_decomposition(fine, coarse, 2, true);
    const CoarseLevel& cl = *dd.coarse;

    // coarse nodal basis: one at the coincident fine vertex, zero at the others
    std::vector<double> e(static_cast<std::size_t>(cl.stiffness.dim()), 0.0);
    e[cl.mesh.interior_index(2, 1)] = 1.0;
    const NodalFunction pe = prolongate(cl, fine, e);
    for (int b = 0; b <= 4; ++b)
        for (int a = 0; a <= 4; ++a)
            CHECK(pe.at(8 * a, 8 * b) == (a == 2 && b == 1 ? 1.0 : 0.0));

    // nested-space embedding: sampling at coarse vertices returns the coefficients
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> c(e.size());
    for (double& v : c) v = dist(rng);
    const NodalFunction pc = prolongate(cl, fine, c);
    for (int b = 1; b < 4; ++b)
        for (int a = 1; a < 4; ++a)
            CHECK(pc.at(8 * a, 8 * b) == c[cl.mesh.interior_index(a, b)]);

    // P1 reproduction of affines inside cells away from the boundary
    const auto affine = [](double x, double y) { return 0.3 + 1.7 * x - 0.9 * y; };
    std::vector<double> ac(e.size());
    for (int b = 1; b < 4; ++b)
        for (int a = 1; a < 4; ++a) {
            const Vec2 p = cl.mesh.coords(a, b);
            ac[cl.mesh.interior_index(a, b)] = affine(p.x, p.y);
        }
    const NodalFunction pa = prolongate(cl, fine, ac);
    for (int fj = 8; fj <= 24; ++fj)
        for (int fi = 8; fi <= 24; ++fi) {
            const Vec2 p{fi / 32.0, fj / 32.0};
            CHECK(pa.at(fi, fj) == doctest::Approx(affine(p.x, p.y)).epsilon(1e-14));
        }
}

TEST_CASE("prolongation transpose is the exact adjoint") {
    const StructuredMesh fine(24), coarse(4);
    const DomainDecomposition dd = build_decomposition(fine, coarse, 2, true);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> c(static_cast<std::size_t>(dd.coarse->stiffness.dim()));
        for (double& v : c) v = dist(rng);
        NodalFunction r(fine);
        for (double& v : r.values) v = dist(rng);

        const NodalFunction pc = prolongate(*dd.coarse, fine, c);
        double lhs = 0.0;
        for (std::size_t k = 0; k < r.values.size(); ++k) lhs += pc.values[k] * r.values[k];
        const std::vector<double> ptr = coarse_gradient_transpose(*dd.coarse, fine, r);
        double rhs = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) rhs += c[k] * ptr[k];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
}

TEST_CASE("positivity-preserving coarse interpolation") {
    const StructuredMesh fine(32), coarse(4);
    const DomainDecomposition dd = build_decomposition(fine, coarse, 2, true);
    const CoarseLevel& cl = *dd.coarse;

    // constant over all fine vertices: every patch minimum is the constant
    NodalFunction c(fine);
    for (double& v : c.values) v = 3.25;
    for (double v : coarse_interpolate_JH(cl, fine, c)) CHECK(v == 3.25);

    // sign change inside every patch sends the coefficient to zero
    NodalFunction alt(fine);
    for (int j = 0; j <= 32; ++j)
        for (int i = 0; i <= 32; ++i) alt.at(i, j) = ((i + j) % 2 == 0) ? 1.0 : -1.0;
    for (double v : coarse_interpolate_JH(cl, fine, alt)) CHECK(v == 0.0);

    // nonnegative input: coefficient equals the patch minimum, checked against
    // an oracle that rasterizes the six coarse triangles from coordinates
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> pos(0.5, 4.0);
    NodalFunction w(fine);
    for (int j = 1; j < 32; ++j)
        for (int i = 1; i < 32; ++i) w.at(i, j) = pos(rng);
    const std::vector<double> jh = coarse_interpolate_JH(cl, fine, w);
    const int s = 8;
    for (int b = 1; b < 4; ++b)
        for (int a = 1; a < 4; ++a) {
            double mn = std::numeric_limits<double>::infinity();
            // the six coarse triangles around (a,b), each rasterized by
            // barycentric membership of the fine vertex coordinates
            const int tris[6][3][2] = {
                {{a, b}, {a + 1, b}, {a + 1, b + 1}},     {{a, b}, {a + 1, b + 1}, {a, b + 1}},
                {{a - 1, b - 1}, {a, b - 1}, {a, b}},     {{a - 1, b - 1}, {a, b}, {a - 1, b}},
                {{a - 1, b}, {a, b}, {a, b + 1}},         {{a, b - 1}, {a + 1, b}, {a, b}}};
            for (const auto& tri : tris) {
                const double x0 = tri[0][0] * s, y0 = tri[0][1] * s;
                const double x1 = tri[1][0] * s, y1 = tri[1][1] * s;
                const double x2 = tri[2][0] * s, y2 = tri[2][1] * s;
                const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
                for (int fj = 0; fj <= 32; ++fj)
                    for (int fi = 0; fi <= 32; ++fi) {
                        const double l1 =
                            ((fi - x0) * (y2 - y0) - (fj - y0) * (x2 - x0)) / det;
                        const double l2 =
                            ((x1 - x0) * (fj - y0) - (y1 - y0) * (fi - x0)) / det;
                        const double l0 = 1.0 - l1 - l2;
                        if (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12)
                            mn = std::min(mn, w.at(fi, fj));
                    }
            }
            CHECK(jh[cl.mesh.interior_index(a, b)] == mn);
        }
}

TEST_CASE("stable decompositions reconstruct exactly") {
    const StructuredMesh fine(32), coarse(4);
    DomainDecomposition dd = build_decomposition(fine, coarse, 2, true);
    build_partition_of_unity(dd);
    std::mt19937_64 rng(23);

    for (int rep = 0; rep < 5; ++rep) {
        const NodalFunction w = random_sh(fine, rng, 1.0);

        const auto parts = stable_decomposition_one_level(dd, w);
        NodalFunction sum1(fine);
        for (std::size_t k = 0; k < parts.size(); ++k)
            add_extended(fine, dd.subdomains[k], parts[k], 1.0, sum1);
        for (std::size_t v = 0; v < w.values.size(); ++v)
            CHECK(std::fabs(sum1.values[v] - w.values[v]) <= 1e-14);

        const auto [w0, locals] = stable_decomposition_two_level(dd, w);
        NodalFunction sum2 = prolongate(*dd.coarse, fine, w0);
        for (std::size_t k = 0; k < locals.size(); ++k)
            add_extended(fine, dd.subdomains[k], locals[k], 1.0, sum2);
        for (std::size_t v = 0; v < w.values.size(); ++v)
            CHECK(std::fabs(sum2.values[v] - w.values[v]) <= 1e-13);
    }

    // w supported deep inside one core touches only that subdomain
    NodalFunction spike(fine);
    spike.at(12, 12) = 1.0;  // interior of core cell (1,1) = subdomain 5
    const auto parts = stable_decomposition_one_level(dd, spike);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        double norm = 0.0;
        for (double v : parts[k]) norm += std::fabs(v);
        if (k == 5)
            CHECK(norm == doctest::Approx(1.0));
        else
            CHECK(norm == 0.0);
    }

    // zero decomposes to zero
    NodalFunction zero(fine);
    const auto [z0, zlocals] = stable_decomposition_two_level(dd, zero);
    for (double v : z0) CHECK(v == 0.0);
    for (const auto& part : zlocals)
        for (double v : part) CHECK(v == 0.0);

    DomainDecomposition one_level = build_decomposition(fine, coarse, 2, false);
    build_partition_of_unity(one_level);
    CHECK_THROWS_AS(stable_decomposition_two_level(one_level, spike), Error);
}

TEST_CASE("two-level positivity of the coarse part") {
    const StructuredMesh fine(32), coarse(4);
    DomainDecomposition dd = build_decomposition(fine, coarse, 2, true);
    build_partition_of_unity(dd);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> pos(0.2, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        NodalFunction w(fine);
        for (int j = 1; j < 32; ++j)
            for (int i = 1; i < 32; ++i) w.at(i, j) = pos(rng);
        const std::vector<double> w0 = coarse_interpolate_JH(*dd.coarse, fine, w);
        const NodalFunction pw = prolongate(*dd.coarse, fine, w0);
        for (std::size_t v = 0; v < pw.values.size(); ++v) {
            CHECK(pw.values[v] >= 0.0);
            CHECK(pw.values[v] <= w.values[v] + 1e-12);
        }
    }
}
