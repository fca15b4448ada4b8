#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "schwarzlin/kernels.hpp"

using namespace schwarzlin;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -2.0,
                               double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol * (1.0 + std::fabs(b)); }

}  // namespace

TEST_CASE("dispatch reports a valid instruction set") {
    CHECK((kernels::isa_name() == "scalar" || kernels::isa_name() == "avx2"));
}

TEST_CASE("soft threshold reference values") {
    const double z[4] = {3.0, -0.5, -2.0, 0.0};
    const double tau[4] = {1.0, 1.0, 0.5, 0.3};
    double out[4];
    kernels::scalar::soft_threshold(z, tau, out, 4);
    CHECK(out[0] == doctest::Approx(2.0));
    CHECK(out[1] == 0.0);
    CHECK(out[2] == doctest::Approx(-1.5));
    CHECK(out[3] == 0.0);
}

TEST_CASE("stencil apply matches a dense multiply") {
    const int nx = 5, ny = 4, dim = nx * ny;
    std::mt19937_64 rng(7);
    std::vector<double> diag = random_vec(rng, dim), bx = random_vec(rng, dim),
                        by = random_vec(rng, dim), x = random_vec(rng, dim), y(dim);
    for (int k = 0; k < dim; ++k)
        if (k % nx == nx - 1) bx[k] = 0.0;  // no coupling across row ends

    kernels::scalar::stencil_apply(nx, ny, diag.data(), bx.data(), by.data(), x.data(), y.data());

    std::vector<double> dense(dim * dim, 0.0);
    for (int k = 0; k < dim; ++k) {
        dense[k * dim + k] = diag[k];
        if (k % nx != nx - 1 && k + 1 < dim) dense[k * dim + k + 1] = dense[(k + 1) * dim + k] = bx[k];
        if (k + nx < dim) dense[k * dim + k + nx] = dense[(k + nx) * dim + k] = by[k];
    }
    for (int r = 0; r < dim; ++r) {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) s += dense[r * dim + c] * x[c];
        CHECK(close(y[r], s, 1e-13));
    }
}

TEST_CASE("wsum_abspow agrees with std::pow") {
    std::mt19937_64 rng(11);
    for (int m : {2, 3, 7, 12}) {
        const auto w = random_vec(rng, 33, 0.0, 1.0);
        const auto y = random_vec(rng, 33);
        double expect = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) expect += w[i] * std::pow(std::fabs(y[i]), m);
        CHECK(close(kernels::scalar::wsum_abspow(w.data(), y.data(), nullptr, 0.0, m, y.size()),
                    expect, 1e-12));
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants agree with the scalar reference") {
    if (!kernels::avx2_supported()) {
        MESSAGE("AVX2 not available on this machine; skipping equivalence checks");
        return;
    }
    std::mt19937_64 rng(42);
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 30u, 65u, 256u}) {
        const auto a = random_vec(rng, n), b = random_vec(rng, n);
        const auto w = random_vec(rng, n, 0.0, 1.0);
        const double t = 0.37;

        CHECK(close(kernels::avx2::dot(a.data(), b.data(), n),
                    kernels::scalar::dot(a.data(), b.data(), n), 1e-13));
        CHECK(close(kernels::avx2::wsum_abs(w.data(), a.data(), b.data(), t, n),
                    kernels::scalar::wsum_abs(w.data(), a.data(), b.data(), t, n), 1e-13));
        for (int m : {2, 3, 6, 12})
            CHECK(close(kernels::avx2::wsum_abspow(w.data(), a.data(), b.data(), t, m, n),
                        kernels::scalar::wsum_abspow(w.data(), a.data(), b.data(), t, m, n),
                        1e-12));

        std::vector<double> y1 = b, y2 = b;
        kernels::avx2::axpy(0.7, a.data(), y1.data(), n);
        kernels::scalar::axpy(0.7, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

        std::vector<double> c1(n), c2(n);
        kernels::avx2::combine(a.data(), -1.3, b.data(), c1.data(), n);
        kernels::scalar::combine(a.data(), -1.3, b.data(), c2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-14));

        kernels::avx2::soft_threshold(a.data(), w.data(), c1.data(), n);
        kernels::scalar::soft_threshold(a.data(), w.data(), c2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(c1[i] == c2[i]);

        std::vector<double> g1(n, 0.1), g2(n, 0.1), d1(n, 0.2), d2(n, 0.2);
        for (int m : {2, 3, 9}) {
            kernels::avx2::wgrad_abspow(w.data(), a.data(), 5.0, m, g1.data(), n);
            kernels::scalar::wgrad_abspow(w.data(), a.data(), 5.0, m, g2.data(), n);
            kernels::avx2::wdiag_abspow(w.data(), a.data(), 5.0, m, d1.data(), n);
            kernels::scalar::wdiag_abspow(w.data(), a.data(), 5.0, m, d2.data(), n);
        }
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-13));
            CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-13));
        }
    }

    // stencil on a realistic grid
    const int nx = 31, ny = 17, dim = nx * ny;
    const auto diag = random_vec(rng, dim), bx = random_vec(rng, dim), by = random_vec(rng, dim),
               x = random_vec(rng, dim);
    std::vector<double> y1(dim), y2(dim);
    kernels::avx2::stencil_apply(nx, ny, diag.data(), bx.data(), by.data(), x.data(), y1.data());
    kernels::scalar::stencil_apply(nx, ny, diag.data(), bx.data(), by.data(), x.data(), y2.data());
    for (int k = 0; k < dim; ++k) CHECK(close(y1[k], y2[k], 1e-13));
}
#endif
