#include <cstdlib>
#include <cstring>

#include "schwarzlin/kernels.hpp"

namespace schwarzlin::kernels {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa select() {
    if (const char* env = std::getenv("SCHWARZLIN_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Isa::avx2;
    }
    return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

const Isa g_isa = select();

}  // namespace

Isa active_isa() { return g_isa; }

std::string_view isa_name() { return g_isa == Isa::avx2 ? "avx2" : "scalar"; }

#if defined(__x86_64__) || defined(_M_X64)
#define SCHWARZLIN_DISPATCH(fn, ...) \
    return g_isa == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define SCHWARZLIN_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) { SCHWARZLIN_DISPATCH(dot, a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    SCHWARZLIN_DISPATCH(axpy, alpha, x, y, n);
}

void combine(const double* x, double c, const double* d, double* out, std::size_t n) {
    SCHWARZLIN_DISPATCH(combine, x, c, d, out, n);
}

void soft_threshold(const double* z, const double* tau, double* out, std::size_t n) {
    SCHWARZLIN_DISPATCH(soft_threshold, z, tau, out, n);
}

double wsum_abs(const double* w, const double* b, const double* d, double t, std::size_t n) {
    SCHWARZLIN_DISPATCH(wsum_abs, w, b, d, t, n);
}

double wsum_abspow(const double* w, const double* b, const double* d, double t, int m,
                   std::size_t n) {
    SCHWARZLIN_DISPATCH(wsum_abspow, w, b, d, t, m, n);
}

void wgrad_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n) {
    SCHWARZLIN_DISPATCH(wgrad_abspow, w, y, alpha, m, out, n);
}

void wdiag_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n) {
    SCHWARZLIN_DISPATCH(wdiag_abspow, w, y, alpha, m, out, n);
}

void stencil_apply(int nx, int ny, const double* diag, const double* bx, const double* by,
                   const double* x, double* y) {
    SCHWARZLIN_DISPATCH(stencil_apply, nx, ny, diag, bx, by, x, y);
}

}  // namespace schwarzlin::kernels
