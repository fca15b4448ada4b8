#include "schwarzlin/fem.hpp"

#include <lapacke.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/kernels.hpp"

namespace schwarzlin {

// ---------------------------------------------------------------------------
// banded Cholesky via LAPACK

BandedCholesky::BandedCholesky(int dim, int kd, std::vector<double> band)
    : dim_(dim), kd_(kd), ab_(std::move(band)) {
    lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', dim_, kd_, ab_.data(), kd_ + 1);
    if (info != 0)
        raise(Errc::convexity_violation,
              "band Cholesky failed at pivot " + std::to_string(info) + " (matrix not SPD)");
}

void BandedCholesky::solve(const double* rhs, double* x) const {
    if (x != rhs) std::copy(rhs, rhs + dim_, x);
    lapack_int info =
        LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', dim_, kd_, 1, ab_.data(), kd_ + 1, x, dim_);
    if (info != 0) raise(Errc::convexity_violation, "band triangular solve failed");
}

void BandedCholesky::solve_inplace(std::vector<double>& b) const { solve(b.data(), b.data()); }

BandedMatrix::BandedMatrix(int dim, int kd)
    : dim_(dim), kd_(kd), ab_(static_cast<std::size_t>(kd + 1) * dim, 0.0) {}

void BandedMatrix::add(int i, int j, double v) {
    if (i < j) std::swap(i, j);
    ab_[static_cast<std::size_t>(j) * (kd_ + 1) + (i - j)] += v;
}

BandedCholesky BandedMatrix::factor() const { return BandedCholesky(dim_, kd_, ab_); }

// ---------------------------------------------------------------------------
// stiffness assembly

SparseSymmetricOperator::SparseSymmetricOperator(int nx, int ny)
    : nx_(nx),
      ny_(ny),
      diag_(static_cast<std::size_t>(nx) * ny, 0.0),
      off_x_(static_cast<std::size_t>(nx) * ny, 0.0),
      off_y_(static_cast<std::size_t>(nx) * ny, 0.0) {}

SparseSymmetricOperator SparseSymmetricOperator::assemble_box(int cells_x, int cells_y) {
    if (cells_x < 2 || cells_y < 2)
        raise(Errc::invalid_mesh, "stiffness box needs at least 2x2 cells");
    const int nx = cells_x - 1;
    SparseSymmetricOperator A(nx, cells_y - 1);

    // Reference element matrices (independent of h in 2d). Lower triangle
    // vertices (p,q),(p+1,q),(p+1,q+1); upper (p,q),(p+1,q+1),(p,q+1).
    static const double Klow[3][3] = {{0.5, -0.5, 0.0}, {-0.5, 1.0, -0.5}, {0.0, -0.5, 0.5}};
    static const double Kup[3][3] = {{0.5, 0.0, -0.5}, {0.0, 0.5, -0.5}, {-0.5, -0.5, 1.0}};

    auto dof = [&](int i, int j) -> int {
        if (i <= 0 || j <= 0 || i >= cells_x || j >= cells_y) return -1;
        return (j - 1) * nx + (i - 1);
    };
    auto scatter = [&](const int (&v)[3][2], const double (&K)[3][3]) {
        for (int r = 0; r < 3; ++r) {
            const int dr = dof(v[r][0], v[r][1]);
            if (dr < 0) continue;
            for (int s = r; s < 3; ++s) {
                const int ds = dof(v[s][0], v[s][1]);
                if (ds < 0) continue;
                const int lo = std::min(dr, ds), hi = std::max(dr, ds);
                const int delta = hi - lo;
                if (delta == 0)
                    A.diag_[lo] += K[r][s];
                else if (delta == 1)
                    A.off_x_[lo] += K[r][s];
                else if (delta == nx)
                    A.off_y_[lo] += K[r][s];
                else if (K[r][s] != 0.0)
                    raise(Errc::invalid_mesh, "unexpected stiffness coupling");
            }
        }
    };

    for (int q = 0; q < cells_y; ++q) {
        for (int p = 0; p < cells_x; ++p) {
            const int low[3][2] = {{p, q}, {p + 1, q}, {p + 1, q + 1}};
            const int up[3][2] = {{p, q}, {p + 1, q + 1}, {p, q + 1}};
            scatter(low, Klow);
            scatter(up, Kup);
        }
    }
    return A;
}

SparseSymmetricOperator assemble_stiffness(const StructuredMesh& mesh) {
    return SparseSymmetricOperator::assemble_box(mesh.n(), mesh.n());
}

void SparseSymmetricOperator::apply(const double* x, double* y) const {
    kernels::stencil_apply(nx_, ny_, diag_.data(), off_x_.data(), off_y_.data(), x, y);
}

double SparseSymmetricOperator::quad_form(const double* x) const {
    std::vector<double> y(static_cast<std::size_t>(dim()));
    apply(x, y.data());
    return kernels::dot(x, y.data(), y.size());
}

double SparseSymmetricOperator::entry(int row, int col) const {
    const int lo = std::min(row, col), hi = std::max(row, col);
    const int delta = hi - lo;
    if (delta == 0) return diag_[lo];
    if (delta == 1 && (lo % nx_) != nx_ - 1) return off_x_[lo];
    if (delta == nx_) return off_y_[lo];
    return 0.0;
}

double SparseSymmetricOperator::symmetry_defect() const { return 0.0; }

BandedCholesky SparseSymmetricOperator::factor(const double* extra_diag) const {
    const int kd = nx_;
    const int ldab = kd + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * dim(), 0.0);
    for (int j = 0; j < dim(); ++j) {
        ab[static_cast<std::size_t>(j) * ldab] = diag_[j] + (extra_diag ? extra_diag[j] : 0.0);
        if ((j % nx_) != nx_ - 1 && j + 1 < dim()) ab[static_cast<std::size_t>(j) * ldab + 1] = off_x_[j];
        if (j + nx_ < dim()) ab[static_cast<std::size_t>(j) * ldab + kd] = off_y_[j];
    }
    return BandedCholesky(dim(), kd, std::move(ab));
}

void SparseSymmetricOperator::add_diagonal(const double* extra) {
    for (int k = 0; k < dim(); ++k) diag_[k] += extra[k];
}

BandedMatrix SparseSymmetricOperator::to_banded(int kd) const {
    if (kd < nx_) raise(Errc::usage, "bandwidth too small for stiffness pattern");
    BandedMatrix B(dim(), kd);
    for (int j = 0; j < dim(); ++j) {
        B.add(j, j, diag_[j]);
        if ((j % nx_) != nx_ - 1 && j + 1 < dim()) B.add(j + 1, j, off_x_[j]);
        if (j + nx_ < dim()) B.add(j + nx_, j, off_y_[j]);
    }
    return B;
}

// ---------------------------------------------------------------------------
// separable nonlinearity

SeparableTerm::SeparableTerm(const NonlinearModel& model, std::vector<double> weights,
                             std::vector<double> loads)
    : family_(model.family),
      alpha_(model.alpha),
      m_(model.m),
      smooth_(model.smooth),
      w_(std::move(weights)),
      g_(std::move(loads)) {
    wg_.resize(w_.size());
    for (std::size_t i = 0; i < w_.size(); ++i) wg_[i] = w_[i] * g_[i];
}

double SeparableTerm::sum_line(const double* b, const double* d, double t) const {
    const std::size_t n = w_.size();
    double core = 0.0;
    switch (family_) {
        case ModelFamily::monomial:
            core = (alpha_ / m_) * kernels::wsum_abspow(w_.data(), b, d, t, m_, n);
            break;
        case ModelFamily::poisson_boltzmann: {
            const double inv = 1.0 / alpha_;
            if (d) {
                for (std::size_t i = 0; i < n; ++i)
                    core += w_[i] * inv * std::cosh(alpha_ * (b[i] + t * d[i]));
            } else {
                for (std::size_t i = 0; i < n; ++i) core += w_[i] * inv * std::cosh(alpha_ * b[i]);
            }
            break;
        }
        case ModelFamily::l1:
            core = alpha_ * kernels::wsum_abs(w_.data(), b, d, t, n);
            break;
    }
    double linear = kernels::dot(wg_.data(), b, n);
    if (d) linear += t * kernels::dot(wg_.data(), d, n);
    return core - linear;
}

double SeparableTerm::sum_line_delta(const double* b, const double* d, double t) const {
    const std::size_t n = w_.size();
    double core = 0.0;
    switch (family_) {
        case ModelFamily::monomial: {
            const double c = alpha_ / m_;
            for (std::size_t i = 0; i < n; ++i) {
                const double y0 = std::fabs(b[i]);
                const double y1 = std::fabs(b[i] + t * d[i]);
                double p0 = 1.0, p1 = 1.0;
                for (int k = 0; k < m_; ++k) {
                    p0 *= y0;
                    p1 *= y1;
                }
                core += w_[i] * c * (p1 - p0);
            }
            break;
        }
        case ModelFamily::poisson_boltzmann: {
            // cosh X - cosh Y = 2 sinh((X+Y)/2) sinh((X-Y)/2) with the half
            // difference formed directly from t*d, so the result keeps full
            // relative accuracy however small the increment is
            const double inv = 1.0 / alpha_;
            for (std::size_t i = 0; i < n; ++i) {
                const double half_step = 0.5 * alpha_ * t * d[i];
                const double mid = alpha_ * b[i] + half_step;
                core += w_[i] * inv * 2.0 * std::sinh(mid) * std::sinh(half_step);
            }
            break;
        }
        case ModelFamily::l1:
            for (std::size_t i = 0; i < n; ++i)
                core += w_[i] * alpha_ * (std::fabs(b[i] + t * d[i]) - std::fabs(b[i]));
            break;
    }
    return core - t * kernels::dot(wg_.data(), d, n);
}

void SeparableTerm::add_grad(const double* y, double* out) const {
    const std::size_t n = w_.size();
    switch (family_) {
        case ModelFamily::monomial:
            kernels::wgrad_abspow(w_.data(), y, alpha_, m_, out, n);
            break;
        case ModelFamily::poisson_boltzmann:
            for (std::size_t i = 0; i < n; ++i) out[i] += w_[i] * std::sinh(alpha_ * y[i]);
            break;
        case ModelFamily::l1:
            raise(Errc::unsupported_operation, "l1 term has no gradient");
    }
    kernels::axpy(-1.0, wg_.data(), out, n);
}

void SeparableTerm::add_hess_diag(const double* y, double* out) const {
    const std::size_t n = w_.size();
    switch (family_) {
        case ModelFamily::monomial:
            kernels::wdiag_abspow(w_.data(), y, alpha_, m_, out, n);
            break;
        case ModelFamily::poisson_boltzmann: {
            for (std::size_t i = 0; i < n; ++i) out[i] += w_[i] * alpha_ * std::cosh(alpha_ * y[i]);
            break;
        }
        case ModelFamily::l1:
            raise(Errc::unsupported_operation, "l1 term has no Hessian");
    }
}

void SeparableTerm::prox(double step, const double* z, double* out) const {
    if (family_ != ModelFamily::l1)
        raise(Errc::unsupported_operation, "prox only defined for the l1 term");
    const std::size_t n = w_.size();
    std::vector<double> shifted(n), tau(n);
    kernels::combine(z, step, wg_.data(), shifted.data(), n);
    for (std::size_t i = 0; i < n; ++i) tau[i] = step * alpha_ * w_[i];
    kernels::soft_threshold(shifted.data(), tau.data(), out, n);
}

SeparableTerm full_term(const StructuredMesh& mesh, const NonlinearModel& model) {
    const int n = mesh.n();
    std::vector<double> w = mesh.nodal_weights();
    std::vector<double> g(w.size());
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const Vec2 p = mesh.coords(i, j);
            g[mesh.vertex_id(i, j)] = model.load(p.x, p.y);
        }
    return SeparableTerm(model, std::move(w), std::move(g));
}

SeparableTerm interior_term(const StructuredMesh& mesh, const NonlinearModel& model) {
    const int n = mesh.n();
    const std::vector<double> wv = mesh.nodal_weights();
    std::vector<double> w(static_cast<std::size_t>(mesh.interior_count()));
    std::vector<double> g(w.size());
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const int d = mesh.interior_index(i, j);
            const Vec2 p = mesh.coords(i, j);
            w[d] = wv[mesh.vertex_id(i, j)];
            g[d] = model.load(p.x, p.y);
        }
    return SeparableTerm(model, std::move(w), std::move(g));
}

// ---------------------------------------------------------------------------
// energy / gradient / Hessian

namespace {

void require_in_sh(const StructuredMesh& mesh, const NodalFunction& u) {
    const int n = mesh.n();
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (mesh.is_boundary(i, j) && std::fabs(u.at(i, j)) > 1e-12)
                raise(Errc::usage, "function is not in S_h: nonzero boundary value at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
}

}  // namespace

double energy(const StructuredMesh& mesh, const NonlinearModel& model, const NodalFunction& u,
              const SparseSymmetricOperator& A) {
    require_in_sh(mesh, u);
    std::vector<double> ui = gather_interior(mesh, u);
    const double quad = 0.5 * A.quad_form(ui.data());

    const SeparableTerm G = full_term(mesh, model);
    const double g = G.sum(u.values.data());
    if (!std::isfinite(g)) {
        // locate the offending vertex through the throwing pointwise interface
        const int n = mesh.n();
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                try {
                    double v = model.phi(mesh.coords(i, j), u.at(i, j));
                    if (!std::isfinite(v)) raise(Errc::numeric_overflow, "phi not finite");
                } catch (const Error& e) {
                    if (e.code() == Errc::numeric_overflow)
                        raise(Errc::numeric_overflow, "phi overflow at vertex (" +
                                                          std::to_string(i) + "," +
                                                          std::to_string(j) + ")");
                    throw;
                }
            }
        raise(Errc::numeric_overflow, "non-finite nonlinearity sum");
    }
    return quad + g;
}

double energy(const StructuredMesh& mesh, const NonlinearModel& model, const NodalFunction& u) {
    return energy(mesh, model, u, assemble_stiffness(mesh));
}

std::vector<double> gradient(const StructuredMesh& mesh, const NonlinearModel& model,
                             const NodalFunction& u) {
    if (!model.smooth)
        raise(Errc::unsupported_operation, "gradient needs a smooth model");
    require_in_sh(mesh, u);
    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    std::vector<double> ui = gather_interior(mesh, u);
    std::vector<double> out(ui.size());
    A.apply(ui.data(), out.data());
    interior_term(mesh, model).add_grad(ui.data(), out.data());
    return out;
}

SparseSymmetricOperator hessian(const StructuredMesh& mesh, const NonlinearModel& model,
                                const NodalFunction& u) {
    if (!model.smooth)
        raise(Errc::unsupported_operation, "hessian needs a twice differentiable model");
    require_in_sh(mesh, u);
    SparseSymmetricOperator A = assemble_stiffness(mesh);
    std::vector<double> ui = gather_interior(mesh, u);
    std::vector<double> extra(ui.size(), 0.0);
    interior_term(mesh, model).add_hess_diag(ui.data(), extra.data());
    for (std::size_t k = 0; k < extra.size(); ++k)
        if (extra[k] < 0.0)
            raise(Errc::convexity_violation,
                  "negative curvature contribution at dof " + std::to_string(k));
    A.add_diagonal(extra.data());
    return A;
}

NodalFunction interpolate(const StructuredMesh& mesh, const ScalarField& f) {
    NodalFunction u(mesh);
    const int n = mesh.n();
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const Vec2 p = mesh.coords(i, j);
            u.at(i, j) = f(p.x, p.y);
        }
    return u;
}

// ---------------------------------------------------------------------------
// error norms (3-point edge-midpoint rule, exact for quadratics)

namespace {

struct Tri {
    // vertex grid coords
    int vi[3], vj[3];
    // constant gradient of the P1 function on this triangle
    Vec2 grad;
};

template <class Visit>
void for_each_element(const StructuredMesh& mesh, const NodalFunction& u, Visit&& visit) {
    const int n = mesh.n();
    const double h = mesh.h();
    for (int q = 0; q < n; ++q) {
        for (int p = 0; p < n; ++p) {
            const double uA = u.at(p, q), uB = u.at(p + 1, q), uC = u.at(p + 1, q + 1),
                         uD = u.at(p, q + 1);
            Tri low{{p, p + 1, p + 1}, {q, q, q + 1}, {(uB - uA) / h, (uC - uB) / h}};
            Tri up{{p, p + 1, p}, {q, q + 1, q + 1}, {(uC - uD) / h, (uD - uA) / h}};
            visit(low, uA, uB, uC);
            visit(up, uA, uC, uD);
        }
    }
}

}  // namespace

double h1_seminorm_error(const StructuredMesh& mesh, const NodalFunction& u,
                         const VectorField& exact_grad) {
    const double wq = mesh.h() * mesh.h() / 6.0;  // |T|/3
    double acc = 0.0;
    for_each_element(mesh, u, [&](const Tri& t, double, double, double) {
        for (int e = 0; e < 3; ++e) {
            const int a = e, b = (e + 1) % 3;
            const double mx = 0.5 * (t.vi[a] + t.vi[b]) * mesh.h();
            const double my = 0.5 * (t.vj[a] + t.vj[b]) * mesh.h();
            const Vec2 ge = exact_grad(mx, my);
            const double dx = t.grad.x - ge.x, dy = t.grad.y - ge.y;
            acc += wq * (dx * dx + dy * dy);
        }
    });
    return std::sqrt(acc);
}

double h1_error(const StructuredMesh& mesh, const NodalFunction& u, const ScalarField& exact,
                const VectorField& exact_grad) {
    const double wq = mesh.h() * mesh.h() / 6.0;
    double acc = 0.0;
    for_each_element(mesh, u, [&](const Tri& t, double u0, double u1, double u2) {
        const double uv[3] = {u0, u1, u2};
        for (int e = 0; e < 3; ++e) {
            const int a = e, b = (e + 1) % 3;
            const double mx = 0.5 * (t.vi[a] + t.vi[b]) * mesh.h();
            const double my = 0.5 * (t.vj[a] + t.vj[b]) * mesh.h();
            const Vec2 ge = exact_grad(mx, my);
            const double dx = t.grad.x - ge.x, dy = t.grad.y - ge.y;
            const double dv = 0.5 * (uv[a] + uv[b]) - exact(mx, my);
            acc += wq * (dx * dx + dy * dy + dv * dv);
        }
    });
    return std::sqrt(acc);
}

double l1_error(const StructuredMesh& mesh, const NodalFunction& u, const ScalarField& exact) {
    const double wq = mesh.h() * mesh.h() / 6.0;
    double acc = 0.0;
    for_each_element(mesh, u, [&](const Tri& t, double u0, double u1, double u2) {
        const double uv[3] = {u0, u1, u2};
        for (int e = 0; e < 3; ++e) {
            const int a = e, b = (e + 1) % 3;
            const double mx = 0.5 * (t.vi[a] + t.vi[b]) * mesh.h();
            const double my = 0.5 * (t.vj[a] + t.vj[b]) * mesh.h();
            acc += wq * std::fabs(0.5 * (uv[a] + uv[b]) - exact(mx, my));
        }
    });
    return acc;
}

}  // namespace schwarzlin
