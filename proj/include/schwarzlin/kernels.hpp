#pragma once

#include <cstddef>
#include <string_view>

// Array kernels for the solver's inner loops. Every kernel has a scalar
// reference implementation and (on x86-64) an AVX2+FMA variant; the active
// set is chosen once at runtime from CPUID. SCHWARZLIN_SIMD=scalar|avx2
// forces a path (used by the equivalence tests).
namespace schwarzlin::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
std::string_view isa_name();
bool avx2_supported();

// ----- dispatched entry points ---------------------------------------------

// sum_i a_i b_i
double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// out = x + c * d
void combine(const double* x, double c, const double* d, double* out, std::size_t n);

// out_i = sign(z_i) * max(|z_i| - tau_i, 0)
void soft_threshold(const double* z, const double* tau, double* out, std::size_t n);

// sum_i w_i |b_i + t d_i|          (d may be null, meaning d = 0)
double wsum_abs(const double* w, const double* b, const double* d, double t, std::size_t n);

// sum_i w_i |b_i + t d_i|^m        (m >= 2; d may be null)
double wsum_abspow(const double* w, const double* b, const double* d, double t, int m,
                   std::size_t n);

// out_i += w_i * alpha * |y_i|^{m-2} y_i
void wgrad_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n);

// out_i += w_i * alpha * (m-1) * |y_i|^{m-2}
void wdiag_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n);

// Pentadiagonal symmetric stencil on an nx*ny grid, lexicographic layout:
//   y_k = diag_k x_k + bx_{k-1} x_{k-1} + bx_k x_{k+1} + by_{k-nx} x_{k-nx} + by_k x_{k+nx}
// bx has length nx*ny (entry k couples k and k+1; zero at row ends),
// by has length nx*ny (entry k couples k and k+nx).
void stencil_apply(int nx, int ny, const double* diag, const double* bx, const double* by,
                   const double* x, double* y);

// ----- named implementations (for equivalence tests) -----------------------

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void combine(const double* x, double c, const double* d, double* out, std::size_t n);
void soft_threshold(const double* z, const double* tau, double* out, std::size_t n);
double wsum_abs(const double* w, const double* b, const double* d, double t, std::size_t n);
double wsum_abspow(const double* w, const double* b, const double* d, double t, int m,
                   std::size_t n);
void wgrad_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n);
void wdiag_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n);
void stencil_apply(int nx, int ny, const double* diag, const double* bx, const double* by,
                   const double* x, double* y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void combine(const double* x, double c, const double* d, double* out, std::size_t n);
void soft_threshold(const double* z, const double* tau, double* out, std::size_t n);
double wsum_abs(const double* w, const double* b, const double* d, double t, std::size_t n);
double wsum_abspow(const double* w, const double* b, const double* d, double t, int m,
                   std::size_t n);
void wgrad_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n);
void wdiag_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n);
void stencil_apply(int nx, int ny, const double* diag, const double* bx, const double* by,
                   const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace schwarzlin::kernels
