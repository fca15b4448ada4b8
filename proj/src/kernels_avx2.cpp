// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma in its own TU;
// only reached after the runtime CPUID check in kernels_dispatch.cpp.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "schwarzlin/kernels.hpp"

namespace schwarzlin::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline __m256d vabs(__m256d v) {
    const __m256d mask = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(mask, v);
}

// |v|^m with uniform integer exponent
inline __m256d vabspow(__m256d v, int m) {
    __m256d base = vabs(v);
    __m256d r = _mm256_set1_pd(1.0);
    while (m > 0) {
        if (m & 1) r = _mm256_mul_pd(r, base);
        base = _mm256_mul_pd(base, base);
        m >>= 1;
    }
    return r;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void combine(const double* x, double c, const double* d, double* out, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_fmadd_pd(vc, _mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(out + i, v);
    }
    for (; i < n; ++i) out[i] = x[i] + c * d[i];
}

void soft_threshold(const double* z, const double* tau, double* out, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vz = _mm256_loadu_pd(z + i);
        __m256d mag = _mm256_sub_pd(_mm256_andnot_pd(signmask, vz), _mm256_loadu_pd(tau + i));
        mag = _mm256_max_pd(mag, zero);
        __m256d sign = _mm256_and_pd(vz, signmask);
        _mm256_storeu_pd(out + i, _mm256_or_pd(mag, sign));
    }
    for (; i < n; ++i) {
        double a = std::fabs(z[i]) - tau[i];
        out[i] = a > 0.0 ? std::copysign(a, z[i]) : 0.0;
    }
}

double wsum_abs(const double* w, const double* b, const double* d, double t, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const __m256d vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    if (d) {
        for (; i + 4 <= n; i += 4) {
            __m256d v = _mm256_fmadd_pd(vt, _mm256_loadu_pd(d + i), _mm256_loadu_pd(b + i));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabs(v), acc);
        }
        double s = hsum(acc);
        for (; i < n; ++i) s += w[i] * std::fabs(b[i] + t * d[i]);
        return s;
    }
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabs(_mm256_loadu_pd(b + i)), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * std::fabs(b[i]);
    return s;
}

namespace {
inline double abspow1(double y, int m) {
    double base = std::fabs(y), r = 1.0;
    while (m > 0) {
        if (m & 1) r *= base;
        base *= base;
        m >>= 1;
    }
    return r;
}
}  // namespace

double wsum_abspow(const double* w, const double* b, const double* d, double t, int m,
                   std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const __m256d vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    if (d) {
        for (; i + 4 <= n; i += 4) {
            __m256d v = _mm256_fmadd_pd(vt, _mm256_loadu_pd(d + i), _mm256_loadu_pd(b + i));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabspow(v, m), acc);
        }
        double s = hsum(acc);
        for (; i < n; ++i) s += w[i] * abspow1(b[i] + t * d[i], m);
        return s;
    }
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), vabspow(_mm256_loadu_pd(b + i), m), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * abspow1(b[i], m);
    return s;
}

void wgrad_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d f = _mm256_mul_pd(vabspow(vy, m - 2), vy);
        f = _mm256_mul_pd(_mm256_mul_pd(va, _mm256_loadu_pd(w + i)), f);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), f));
    }
    for (; i < n; ++i) out[i] += w[i] * alpha * abspow1(y[i], m - 2) * y[i];
}

void wdiag_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n) {
    const double c = alpha * (m - 1);
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d f = _mm256_mul_pd(vc, _mm256_mul_pd(_mm256_loadu_pd(w + i),
                                                    vabspow(_mm256_loadu_pd(y + i), m - 2)));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), f));
    }
    for (; i < n; ++i) out[i] += w[i] * c * abspow1(y[i], m - 2);
}

void stencil_apply(int nx, int ny, const double* diag, const double* bx, const double* by,
                   const double* x, double* y) {
    for (int j = 0; j < ny; ++j) {
        const int row = j * nx;
        auto edge = [&](int i) {
            const int k = row + i;
            double v = diag[k] * x[k];
            if (i > 0) v += bx[k - 1] * x[k - 1];
            if (i + 1 < nx) v += bx[k] * x[k + 1];
            if (j > 0) v += by[k - nx] * x[k - nx];
            if (j + 1 < ny) v += by[k] * x[k + nx];
            y[k] = v;
        };
        edge(0);
        int i = 1;
        for (; i + 4 < nx; i += 4) {
            const int k = row + i;
            __m256d v = _mm256_mul_pd(_mm256_loadu_pd(diag + k), _mm256_loadu_pd(x + k));
            v = _mm256_fmadd_pd(_mm256_loadu_pd(bx + k - 1), _mm256_loadu_pd(x + k - 1), v);
            v = _mm256_fmadd_pd(_mm256_loadu_pd(bx + k), _mm256_loadu_pd(x + k + 1), v);
            if (j > 0)
                v = _mm256_fmadd_pd(_mm256_loadu_pd(by + k - nx), _mm256_loadu_pd(x + k - nx), v);
            if (j + 1 < ny)
                v = _mm256_fmadd_pd(_mm256_loadu_pd(by + k), _mm256_loadu_pd(x + k + nx), v);
            _mm256_storeu_pd(y + k, v);
        }
        for (; i < nx; ++i) edge(i);
    }
}

}  // namespace schwarzlin::kernels::avx2

#endif  // x86-64
