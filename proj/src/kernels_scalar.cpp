#include <cmath>

#include "schwarzlin/kernels.hpp"

namespace schwarzlin::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void combine(const double* x, double c, const double* d, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + c * d[i];
}

void soft_threshold(const double* z, const double* tau, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::fabs(z[i]) - tau[i];
        out[i] = a > 0.0 ? std::copysign(a, z[i]) : 0.0;
    }
}

double wsum_abs(const double* w, const double* b, const double* d, double t, std::size_t n) {
    double s = 0.0;
    if (d) {
        for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(b[i] + t * d[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(b[i]);
    }
    return s;
}

namespace {
// |y|^m by square-and-multiply; m >= 0
inline double abspow(double y, int m) {
    double base = std::fabs(y);
    double r = 1.0;
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
    double s = 0.0;
    if (d) {
        for (std::size_t i = 0; i < n; ++i) s += w[i] * abspow(b[i] + t * d[i], m);
    } else {
        for (std::size_t i = 0; i < n; ++i) s += w[i] * abspow(b[i], m);
    }
    return s;
}

void wgrad_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] += w[i] * alpha * abspow(y[i], m - 2) * y[i];
}

void wdiag_abspow(const double* w, const double* y, double alpha, int m, double* out,
                  std::size_t n) {
    const double c = alpha * (m - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] += w[i] * c * abspow(y[i], m - 2);
}

void stencil_apply(int nx, int ny, const double* diag, const double* bx, const double* by,
                   const double* x, double* y) {
    for (int j = 0; j < ny; ++j) {
        const int row = j * nx;
        for (int i = 0; i < nx; ++i) {
            const int k = row + i;
            double v = diag[k] * x[k];
            if (i > 0) v += bx[k - 1] * x[k - 1];
            if (i + 1 < nx) v += bx[k] * x[k + 1];
            if (j > 0) v += by[k - nx] * x[k - nx];
            if (j + 1 < ny) v += by[k] * x[k + nx];
            y[k] = v;
        }
    }
}

}  // namespace schwarzlin::kernels::scalar
