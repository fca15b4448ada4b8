#include "schwarzlin/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/kernels.hpp"

namespace schwarzlin {

namespace {

using kernels::axpy;
using kernels::combine;
using kernels::dot;

// P and P^T restricted to interior fine vertices (dof-index vectors on both sides)
void prolong_interior(const CoarseLevel& cl, const StructuredMesh& fine, const double* coarse,
                      double* fine_int) {
    const int s = refinement_factor(fine, cl.mesh);
    const int n = fine.n();
    for (int fj = 1; fj < n; ++fj) {
        for (int fi = 1; fi < n; ++fi) {
            const CoarseSupport sup = coarse_support(cl.mesh, s, fi, fj);
            double val = 0.0;
            for (int t = 0; t < 3; ++t)
                if (sup.dof[t] >= 0) val += sup.lambda[t] * coarse[sup.dof[t]];
            fine_int[fine.interior_index(fi, fj)] = val;
        }
    }
}

void prolong_transpose_interior(const CoarseLevel& cl, const StructuredMesh& fine,
                                const double* fine_int, double* coarse) {
    const int s = refinement_factor(fine, cl.mesh);
    const int n = fine.n();
    std::fill(coarse, coarse + cl.mesh.interior_count(), 0.0);
    for (int fj = 1; fj < n; ++fj) {
        for (int fi = 1; fi < n; ++fi) {
            const double r = fine_int[fine.interior_index(fi, fj)];
            if (r == 0.0) continue;
            const CoarseSupport sup = coarse_support(cl.mesh, s, fi, fj);
            for (int t = 0; t < 3; ++t)
                if (sup.dof[t] >= 0) coarse[sup.dof[t]] += sup.lambda[t] * r;
        }
    }
}

void check_nonnegative_curvature(const std::vector<double>& d) {
    for (std::size_t k = 0; k < d.size(); ++k)
        if (d[k] < 0.0)
            raise(Errc::convexity_violation,
                  "negative curvature contribution at dof " + std::to_string(k));
}

}  // namespace

// ---------------------------------------------------------------------------
// BoxProblem

BoxProblem::BoxProblem(const SparseSymmetricOperator& A, std::vector<double> linear,
                       const SeparableTerm& term, std::vector<double> shift)
    : A_(&A), r_(std::move(linear)), term_(&term), shift_(std::move(shift)) {
    g0_ = term_->sum(shift_.data());
}

double BoxProblem::value(const double* w) const {
    const std::size_t n = r_.size();
    return 0.5 * A_->quad_form(w) + dot(r_.data(), w, n) +
           term_->sum_line(shift_.data(), w, 1.0) - g0_;
}

void BoxProblem::gradient(const double* w, double* g) const {
    const std::size_t n = r_.size();
    A_->apply(w, g);
    axpy(1.0, r_.data(), g, n);
    std::vector<double> y(n);
    combine(shift_.data(), 1.0, w, y.data(), n);
    term_->add_grad(y.data(), g);
}

BandedCholesky BoxProblem::hessian_factor(const double* w) const {
    const std::size_t n = r_.size();
    std::vector<double> y(n), extra(n, 0.0);
    combine(shift_.data(), 1.0, w, y.data(), n);
    term_->add_hess_diag(y.data(), extra.data());
    check_nonnegative_curvature(extra);
    return A_->factor(extra.data());
}

std::function<double(double)> BoxProblem::line(const double* w, const double* p) const {
    const std::size_t n = r_.size();
    std::vector<double> Aw(n), Ap(n), base(n), dir(p, p + n);
    A_->apply(w, Aw.data());
    A_->apply(p, Ap.data());
    const double q1 = dot(p, Aw.data(), n) + dot(r_.data(), p, n);
    const double q2 = 0.5 * dot(p, Ap.data(), n);
    combine(shift_.data(), 1.0, w, base.data(), n);
    const SeparableTerm* term = term_;
    return [q1, q2, term, base = std::move(base), dir = std::move(dir)](double t) {
        return t * (q1 + t * q2) + term->sum_line_delta(base.data(), dir.data(), t);
    };
}

// ---------------------------------------------------------------------------
// CoarseProblem

CoarseProblem::CoarseProblem(const CoarseLevel& cl, const StructuredMesh& fine,
                             const SeparableTerm& interior, std::vector<double> linear,
                             std::vector<double> fine_shift)
    : cl_(&cl),
      fine_(&fine),
      term_(&interior),
      r_(std::move(linear)),
      shift_(std::move(fine_shift)),
      s_(refinement_factor(fine, cl.mesh)) {
    g0_ = term_->sum(shift_.data());
}

std::vector<double> CoarseProblem::prolong_interior(const double* c) const {
    std::vector<double> out(static_cast<std::size_t>(fine_->interior_count()));
    schwarzlin::prolong_interior(*cl_, *fine_, c, out.data());
    return out;
}

double CoarseProblem::value(const double* c) const {
    const std::size_t nc = r_.size();
    std::vector<double> pc = prolong_interior(c);
    return 0.5 * cl_->stiffness.quad_form(c) + dot(r_.data(), c, nc) +
           term_->sum_line(shift_.data(), pc.data(), 1.0) - g0_;
}

void CoarseProblem::gradient(const double* c, double* g) const {
    const std::size_t nc = r_.size();
    const std::size_t nf = shift_.size();
    cl_->stiffness.apply(c, g);
    axpy(1.0, r_.data(), g, nc);
    std::vector<double> pc = prolong_interior(c);
    std::vector<double> y(nf), ng(nf, 0.0);
    combine(shift_.data(), 1.0, pc.data(), y.data(), nf);
    term_->add_grad(y.data(), ng.data());
    std::vector<double> gc(nc);
    prolong_transpose_interior(*cl_, *fine_, ng.data(), gc.data());
    axpy(1.0, gc.data(), g, nc);
}

BandedCholesky CoarseProblem::hessian_factor(const double* c) const {
    const std::size_t nf = shift_.size();
    std::vector<double> pc = prolong_interior(c);
    std::vector<double> y(nf), d(nf, 0.0);
    combine(shift_.data(), 1.0, pc.data(), y.data(), nf);
    term_->add_hess_diag(y.data(), d.data());
    check_nonnegative_curvature(d);

    // A0 + P^T diag(d) P; the triple product widens the band to nc
    BandedMatrix B = cl_->stiffness.to_banded(cl_->mesh.n());
    const int n = fine_->n();
    for (int fj = 1; fj < n; ++fj) {
        for (int fi = 1; fi < n; ++fi) {
            const double dk = d[fine_->interior_index(fi, fj)];
            if (dk == 0.0) continue;
            const CoarseSupport sup = coarse_support(cl_->mesh, s_, fi, fj);
            for (int a = 0; a < 3; ++a) {
                if (sup.dof[a] < 0) continue;
                for (int b = a; b < 3; ++b) {
                    if (sup.dof[b] < 0) continue;
                    B.add(sup.dof[a], sup.dof[b], sup.lambda[a] * sup.lambda[b] * dk);
                }
            }
        }
    }
    return B.factor();
}

std::function<double(double)> CoarseProblem::line(const double* c, const double* p) const {
    const std::size_t nc = r_.size();
    const std::size_t nf = shift_.size();
    std::vector<double> Ac(nc), Ap(nc);
    cl_->stiffness.apply(c, Ac.data());
    cl_->stiffness.apply(p, Ap.data());
    const double q1 = dot(p, Ac.data(), nc) + dot(r_.data(), p, nc);
    const double q2 = 0.5 * dot(p, Ap.data(), nc);
    std::vector<double> pc = prolong_interior(c);
    std::vector<double> base(nf);
    combine(shift_.data(), 1.0, pc.data(), base.data(), nf);
    std::vector<double> dir = prolong_interior(p);
    const SeparableTerm* term = term_;
    return [q1, q2, term, base = std::move(base), dir = std::move(dir)](double t) {
        return t * (q1 + t * q2) + term->sum_line_delta(base.data(), dir.data(), t);
    };
}

// ---------------------------------------------------------------------------
// LocalComposite

LocalComposite::LocalComposite(const SparseSymmetricOperator& A, std::vector<double> linear,
                               const SeparableTerm& term, std::vector<double> shift)
    : A_(&A), r_(std::move(linear)), term_(&term), v_(std::move(shift)) {
    g0_ = term_->sum(v_.data());
}

void LocalComposite::smooth_gradient(const double* y, double* g) const {
    const std::size_t n = r_.size();
    std::vector<double> d(n);
    combine(y, -1.0, v_.data(), d.data(), n);
    A_->apply(d.data(), g);
    axpy(1.0, r_.data(), g, n);
}

double LocalComposite::objective(const double* y) const {
    const std::size_t n = r_.size();
    std::vector<double> d(n);
    combine(y, -1.0, v_.data(), d.data(), n);
    return 0.5 * A_->quad_form(d.data()) + dot(r_.data(), d.data(), n) + term_->sum(y) - g0_;
}

void LocalComposite::prox(double step, const double* z, double* out) const {
    term_->prox(step, z, out);
}

// ---------------------------------------------------------------------------
// damped Newton

std::pair<std::vector<double>, SolverReport> damped_newton(const NewtonProblem& prob,
                                                           double offset,
                                                           std::vector<double> w, double tol,
                                                           int max_iter) {
    const std::size_t n = static_cast<std::size_t>(prob.dim());
    if (w.empty()) w.assign(n, 0.0);
    std::vector<double> g(n), p(n);
    double F_prev = offset + prob.value(w.data());

    SolverReport rep;
    rep.reason = Termination::max_iterations;
    rep.iterations = max_iter;
    rep.final_objective = F_prev;

    for (int j = 1; j <= max_iter; ++j) {
        prob.gradient(w.data(), g.data());
        if (std::sqrt(dot(g.data(), g.data(), n)) < 1e-14) {
            rep.iterations = j - 1;
            rep.reason = Termination::tolerance;
            return {std::move(w), rep};
        }
        BandedCholesky chol = prob.hessian_factor(w.data());
        for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];
        chol.solve(p.data(), p.data());
        const double gp = dot(g.data(), p.data(), n);
        if (gp >= 0.0) {  // pure-noise direction: already at the optimum
            rep.iterations = j - 1;
            rep.reason = Termination::tolerance;
            return {std::move(w), rep};
        }

        // Armijo backtracking on the decrement: accept when
        // Phi(w + t p) - Phi(w) <= 0.01 t <g, p>, halving from t = 1
        auto delta = prob.line(w.data(), p.data());
        double t = 1.0;
        double dec = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            dec = delta(t);
            if (std::isfinite(dec) && dec <= 0.01 * t * gp) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // The Newton decrement -gp/2 estimates F - min F. If backtracking
            // failed with the remaining gain at rounding level, the iterate is
            // converged; a plain stop-criterion loop would take one more
            // noise-sized step and then observe |dF/F| below tolerance.
            if (0.5 * std::fabs(gp) <= 1e-14 * (1.0 + std::fabs(F_prev))) {
                rep.iterations = j;
                rep.reason = Termination::tolerance;
                return {std::move(w), rep};
            }
            raise(Errc::line_search_failure, "Armijo backtracking exhausted 60 halvings (slope " +
                                                 std::to_string(gp) + ")");
        }

        axpy(t, p.data(), w.data(), n);
        const double F_new = F_prev + dec;
        rep.final_objective = F_new;
        const double denom = std::fabs(F_new) < 1e-300 ? 1.0 : std::fabs(F_new);
        if (std::fabs(F_new - F_prev) / denom < tol) {
            rep.iterations = j;
            rep.reason = Termination::tolerance;
            return {std::move(w), rep};
        }
        F_prev = F_new;
    }
    return {std::move(w), rep};
}

// ---------------------------------------------------------------------------
// AFGM

std::pair<std::vector<double>, SolverReport> afgm(const CompositeProblem& prob, double offset,
                                                  std::vector<double> x, double lipschitz,
                                                  double tol, int max_iter, AfgmTrace* trace) {
    const std::size_t n = static_cast<std::size_t>(prob.dim());
    if (x.empty()) x.assign(n, 0.0);
    if (!(lipschitz > 0.0)) raise(Errc::usage, "afgm needs a positive Lipschitz constant");
    const double step = 1.0 / lipschitz;

    std::vector<double> y = x, g(n), z(n), x_new(n);
    double t = 1.0;
    double F_prev = offset + prob.objective(x.data());
    if (trace) trace->objectives.push_back(F_prev);

    SolverReport rep;
    rep.reason = Termination::max_iterations;
    rep.iterations = max_iter;
    rep.final_objective = F_prev;

    for (int k = 1; k <= max_iter; ++k) {
        prob.smooth_gradient(y.data(), g.data());
        combine(y.data(), -step, g.data(), z.data(), n);
        prob.prox(step, z.data(), x_new.data());

        // gradient-based adaptive restart
        double rdot = 0.0;
        for (std::size_t i = 0; i < n; ++i) rdot += (y[i] - x_new[i]) * (x_new[i] - x[i]);
        if (rdot > 0.0) {
            t = 1.0;
            y = x_new;
            if (trace) trace->restarts.push_back(k);
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double nu = (t - 1.0) / t_next;
            for (std::size_t i = 0; i < n; ++i) y[i] = x_new[i] + nu * (x_new[i] - x[i]);
            t = t_next;
        }

        const double F_new = offset + prob.objective(x_new.data());
        if (trace) trace->objectives.push_back(F_new);
        x.swap(x_new);
        rep.final_objective = F_new;
        const double denom = std::fabs(F_new) < 1e-300 ? 1.0 : std::fabs(F_new);
        if (std::fabs(F_new - F_prev) / denom < tol) {
            rep.iterations = k;
            rep.reason = Termination::tolerance;
            return {std::move(x), rep};
        }
        F_prev = F_new;
    }
    return {std::move(x), rep};
}

// ---------------------------------------------------------------------------
// Lipschitz estimate

double estimate_lipschitz(const LinearOperator& op, int dim) {
    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(dim)), y(static_cast<std::size_t>(dim));
    for (double& v : x) v = dist(rng);
    double nrm = std::sqrt(dot(x.data(), x.data(), x.size()));
    if (nrm == 0.0) return 0.0;
    for (double& v : x) v /= nrm;

    double rayleigh = 0.0;
    for (int it = 0; it < 100; ++it) {
        op(x.data(), y.data());
        rayleigh = dot(x.data(), y.data(), x.size());
        nrm = std::sqrt(dot(y.data(), y.data(), y.size()));
        if (nrm == 0.0) return 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / nrm;
    }
    return 1.01 * rayleigh;
}

// ---------------------------------------------------------------------------
// dual coarse solve for the l1 problem

CoarseDualWorkspace make_coarse_dual_workspace(const CoarseLevel& cl, const StructuredMesh& fine) {
    CoarseDualWorkspace ws;
    ws.factor = std::make_shared<BandedCholesky>(cl.stiffness.factor());
    const int nf = fine.interior_count();
    const int nc = cl.stiffness.dim();
    std::vector<double> tmp_c(static_cast<std::size_t>(nc));
    ws.lipschitz = estimate_lipschitz(
        [&](const double* in, double* out) {
            prolong_transpose_interior(cl, fine, in, tmp_c.data());
            ws.factor->solve_inplace(tmp_c);
            prolong_interior(cl, fine, tmp_c.data(), out);
        },
        nf);
    return ws;
}

std::pair<std::vector<double>, SolverReport> coarse_dual_afgm(
    const CoarseLevel& cl, const StructuredMesh& fine, const NodalFunction& v,
    const NonlinearModel& model, const std::vector<double>& linear, double tol, int max_iter,
    CoarseDualWorkspace* ws) {
    if (model.family != ModelFamily::l1)
        raise(Errc::unsupported_operation, "dual coarse solve is for the l1 model");
    const std::size_t nf = static_cast<std::size_t>(fine.interior_count());
    const std::size_t nc = static_cast<std::size_t>(cl.stiffness.dim());

    CoarseDualWorkspace local_ws;
    if (!ws) {
        local_ws = make_coarse_dual_workspace(cl, fine);
        ws = &local_ws;
    }
    if (ws->lambda.size() != nf) ws->lambda.assign(nf, 0.0);

    const SeparableTerm term = interior_term(fine, model);
    const std::vector<double>& w = term.weights();
    const std::vector<double>& wg = term.weighted_loads();
    std::vector<double> bound(nf);
    for (std::size_t i = 0; i < nf; ++i) bound[i] = w[i] * model.alpha;
    const std::vector<double> v_int = gather_interior(fine, v);

    // fold the linear -g y part of phi into the quadratic side:
    // r_eff = linear - P^T (w o g)
    std::vector<double> r_eff(nc);
    prolong_transpose_interior(cl, fine, wg.data(), r_eff.data());
    for (std::size_t i = 0; i < nc; ++i) r_eff[i] = linear[i] - r_eff[i];

    // c(lambda) = -A0^{-1}(r_eff + P^T lambda); grad of the dual = v + P c
    std::vector<double> q(nc), c(nc), pc(nf);
    auto eval_c = [&](const double* lam) {
        prolong_transpose_interior(cl, fine, lam, q.data());
        axpy(1.0, r_eff.data(), q.data(), nc);
        for (std::size_t i = 0; i < nc; ++i) c[i] = -q[i];
        ws->factor->solve(c.data(), c.data());
        prolong_interior(cl, fine, c.data(), pc.data());
    };
    auto clamp_box = [&](std::vector<double>& lam) {
        for (std::size_t i = 0; i < nf; ++i) lam[i] = std::clamp(lam[i], -bound[i], bound[i]);
    };

    std::vector<double>& lambda = ws->lambda;
    clamp_box(lambda);
    std::vector<double> ylam = lambda, lam_new(nf), zbuf(nf);
    const double step = 1.0 / ws->lipschitz;
    double t = 1.0;

    SolverReport rep;
    rep.reason = Termination::max_iterations;
    for (int k = 1; k <= max_iter; ++k) {
        // ascent step on the dual from the extrapolated multipliers
        eval_c(ylam.data());
        for (std::size_t i = 0; i < nf; ++i) lam_new[i] = ylam[i] + step * (v_int[i] + pc[i]);
        clamp_box(lam_new);

        double rdot = 0.0;
        for (std::size_t i = 0; i < nf; ++i)
            rdot += (ylam[i] - lam_new[i]) * (lam_new[i] - lambda[i]);
        if (rdot > 0.0) {
            t = 1.0;
            ylam = lam_new;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double nu = (t - 1.0) / t_next;
            for (std::size_t i = 0; i < nf; ++i)
                ylam[i] = lam_new[i] + nu * (lam_new[i] - lambda[i]);
            t = t_next;
        }
        lambda.swap(lam_new);

        // primal-dual gap at the recovered primal point
        eval_c(lambda.data());
        std::vector<double>& zl = zbuf;
        combine(v_int.data(), 1.0, pc.data(), zl.data(), nf);
        const double primal = -0.5 * dot(q.data(), c.data(), nc) + dot(r_eff.data(), c.data(), nc) +
                              kernels::wsum_abs(bound.data(), zl.data(), nullptr, 0.0, nf);
        const double dual = 0.5 * dot(q.data(), c.data(), nc) + dot(lambda.data(), v_int.data(), nf);
        const double gap = primal - dual;
        rep.final_objective = primal;
        if (gap < tol * (1.0 + std::fabs(primal))) {
            rep.iterations = k;
            rep.reason = Termination::tolerance;
            return {c, rep};
        }
    }
    raise(Errc::max_iterations,
          "dual coarse solve: gap above tolerance after " + std::to_string(max_iter) +
              " iterations");
}

std::pair<std::vector<double>, SolverReport> coarse_dual_afgm(const CoarseLevel& cl,
                                                              const StructuredMesh& fine,
                                                              const NodalFunction& v,
                                                              const NonlinearModel& model,
                                                              double tol, int max_iter) {
    const SparseSymmetricOperator A = assemble_stiffness(fine);
    std::vector<double> vi = gather_interior(fine, v);
    std::vector<double> Av(vi.size());
    A.apply(vi.data(), Av.data());
    std::vector<double> r(static_cast<std::size_t>(cl.stiffness.dim()));
    prolong_transpose_interior(cl, fine, Av.data(), r.data());
    return coarse_dual_afgm(cl, fine, v, model, r, tol, max_iter, nullptr);
}

// ---------------------------------------------------------------------------
// the outer additive Schwarz iteration

namespace {

struct LocalWorkspace {
    SparseSymmetricOperator A;
    SeparableTerm term;
    double lipschitz = 0.0;
};

void require_sh(const StructuredMesh& mesh, const NodalFunction& u, const char* what) {
    const int n = mesh.n();
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (mesh.is_boundary(i, j) && std::fabs(u.at(i, j)) > 1e-12)
                raise(Errc::usage, std::string(what) + " is not in S_h (nonzero boundary value)");
}

}  // namespace

SchwarzResult schwarz_solve(const SchwarzConfig& config, const StructuredMesh& mesh,
                            const NonlinearModel& model, const DomainDecomposition& dd,
                            const NodalFunction& u0) {
    if (config.levels != 1 && config.levels != 2)
        raise(Errc::usage, "levels must be 1 or 2");
    if (config.levels == 2 && !dd.coarse)
        raise(Errc::missing_coarse, "two-level solve requested on a one-level decomposition");
    if (config.local_tol <= 0.0) raise(Errc::usage, "local tolerance must be positive");

    const bool two_level = config.levels == 2;
    const double tau = config.tau != 0.0 ? config.tau : (two_level ? 1.0 / 5.0 : 1.0 / 4.0);
    if (!(tau > 0.0 && tau <= 1.0)) raise(Errc::usage, "need 0 < tau <= 1");

    LocalSolverKind kind = config.local_solver;
    if (kind == LocalSolverKind::automatic)
        kind = model.smooth ? LocalSolverKind::newton : LocalSolverKind::afgm;
    if (kind == LocalSolverKind::newton && !model.smooth)
        raise(Errc::unsupported_operation, "Newton local solver needs a smooth model");
    if (kind == LocalSolverKind::afgm && model.smooth)
        raise(Errc::unsupported_operation, "the proximal local solver is for the l1 model");

    require_sh(mesh, u0, "u0");

    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    const SeparableTerm G_all = full_term(mesh, model);
    const SeparableTerm G_int = interior_term(mesh, model);
    const std::vector<double> weights = mesh.nodal_weights();

    // per-subdomain quadratic operators and nodal terms, built once
    std::vector<LocalWorkspace> locals;
    locals.reserve(dd.subdomains.size());
    for (const Subdomain& sd : dd.subdomains) {
        LocalWorkspace lw{
            SparseSymmetricOperator::assemble_box(sd.cover.width() - 1, sd.cover.height() - 1),
            SeparableTerm(), 0.0};
        std::vector<double> w(static_cast<std::size_t>(sd.dof_count()));
        std::vector<double> g(w.size());
        std::size_t k = 0;
        for (int j = sd.dofs.y0; j <= sd.dofs.y1; ++j)
            for (int i = sd.dofs.x0; i <= sd.dofs.x1; ++i, ++k) {
                w[k] = weights[mesh.vertex_id(i, j)];
                const Vec2 p = mesh.coords(i, j);
                g[k] = model.load(p.x, p.y);
            }
        lw.term = SeparableTerm(model, std::move(w), std::move(g));
        if (kind == LocalSolverKind::afgm) {
            const SparseSymmetricOperator& Aloc = lw.A;
            lw.lipschitz = estimate_lipschitz(
                [&Aloc](const double* in, double* out) { Aloc.apply(in, out); }, Aloc.dim());
        }
        locals.push_back(std::move(lw));
    }

    CoarseDualWorkspace coarse_ws;
    if (two_level && kind == LocalSolverKind::afgm)
        coarse_ws = make_coarse_dual_workspace(*dd.coarse, mesh);

    NodalFunction u = u0;
    std::vector<double> ui = gather_interior(mesh, u);
    std::vector<double> r_glob(ui.size());

    auto total_energy = [&]() {
        A.apply(ui.data(), r_glob.data());
        const double e = 0.5 * dot(ui.data(), r_glob.data(), ui.size()) + G_all.sum(u.values.data());
        if (!std::isfinite(e)) raise(Errc::numeric_overflow, "energy not finite");
        return e;
    };

    SchwarzResult result;
    result.energies.push_back(total_energy());

    const int coarse_dim = two_level ? dd.coarse->stiffness.dim() : 0;
    const int afgm_max_iter = 200000;

    for (int n_out = 1; n_out <= config.outer_iterations; ++n_out) {
        // r_glob = A u^(n), shared by every subspace problem of this sweep
        A.apply(ui.data(), r_glob.data());
        const double E_cur = result.energies.back();

        NodalFunction corr(mesh);
        SolverReport outer_rep;

        // coarse correction first (index k = 0), then the subdomains in order
        if (two_level) {
            std::vector<double> r0(static_cast<std::size_t>(coarse_dim));
            prolong_transpose_interior(*dd.coarse, mesh, r_glob.data(), r0.data());
            std::vector<double> w0;
            SolverReport rep;
            if (kind == LocalSolverKind::newton) {
                CoarseProblem cp(*dd.coarse, mesh, G_int, std::move(r0), ui);
                std::tie(w0, rep) =
                    damped_newton(cp, E_cur, {}, config.local_tol, config.local_max_iter);
                if (rep.reason == Termination::max_iterations)
                    raise(Errc::max_iterations, "coarse Newton solve did not converge");
            } else {
                std::tie(w0, rep) = coarse_dual_afgm(*dd.coarse, mesh, u, model, r0,
                                                     config.local_tol, afgm_max_iter, &coarse_ws);
            }
            outer_rep.max_inner = std::max(outer_rep.max_inner, rep.iterations);
            NodalFunction pw = prolongate(*dd.coarse, mesh, w0);
            axpy(1.0, pw.values.data(), corr.values.data(), corr.values.size());
        }

        for (std::size_t k = 0; k < dd.subdomains.size(); ++k) {
            const Subdomain& sd = dd.subdomains[k];
            const LocalWorkspace& lw = locals[k];
            const std::size_t nd = static_cast<std::size_t>(sd.dof_count());
            std::vector<double> rk(nd), vk(nd);
            std::size_t q = 0;
            for (int j = sd.dofs.y0; j <= sd.dofs.y1; ++j)
                for (int i = sd.dofs.x0; i <= sd.dofs.x1; ++i, ++q) {
                    rk[q] = r_glob[mesh.interior_index(i, j)];
                    vk[q] = u.at(i, j);
                }
            std::vector<double> wk;
            SolverReport rep;
            try {
                if (kind == LocalSolverKind::newton) {
                    BoxProblem bp(lw.A, std::move(rk), lw.term, std::move(vk));
                    std::tie(wk, rep) =
                        damped_newton(bp, E_cur, {}, config.local_tol, config.local_max_iter);
                    if (rep.reason == Termination::max_iterations)
                        raise(Errc::max_iterations, "local Newton solve did not converge");
                } else {
                    LocalComposite lc(lw.A, std::move(rk), lw.term, vk);
                    std::vector<double> y;
                    std::tie(y, rep) =
                        afgm(lc, E_cur, vk, lw.lipschitz, config.local_tol, afgm_max_iter);
                    if (rep.reason == Termination::max_iterations)
                        raise(Errc::max_iterations, "local proximal solve did not converge");
                    wk.resize(nd);
                    combine(y.data(), -1.0, vk.data(), wk.data(), nd);
                }
            } catch (const Error& e) {
                raise(e.code(), std::string(e.what()) + " (subdomain " + std::to_string(k) + ")");
            }
            outer_rep.max_inner = std::max(outer_rep.max_inner, rep.iterations);
            add_extended(mesh, sd, wk, 1.0, corr);
        }

        axpy(tau, corr.values.data(), u.values.data(), u.values.size());
        ui = gather_interior(mesh, u);
        const double E_new = total_energy();
        if (E_new > E_cur + 1e-12 * (1.0 + std::fabs(E_cur)))
            raise(Errc::algorithmic_regression,
                  "energy increased at outer iteration " + std::to_string(n_out) + " by " +
                      std::to_string(E_new - E_cur));
        outer_rep.iterations = outer_rep.max_inner;
        outer_rep.final_objective = E_new;
        result.energies.push_back(E_new);
        result.outer.push_back(outer_rep);
        result.max_inner_iterations = std::max(result.max_inner_iterations, outer_rep.max_inner);

        if (config.stop_tol > 0.0 &&
            std::fabs(E_new - E_cur) <= config.stop_tol * std::max(1.0, std::fabs(E_new)))
            break;
    }

    result.final = std::move(u);
    return result;
}

// ---------------------------------------------------------------------------
// reference solution with disk cache

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string params_string(const StructuredMesh& mesh, const NonlinearModel& model) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s alpha=%.17g m=%d n=%d", family_name(model.family),
                  model.alpha, model.m, mesh.n());
    return buf;
}

bool load_reference(const std::string& path, const std::string& header, NodalFunction& u) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    if (!std::getline(in, line) || line != header) return false;
    for (double& v : u.values)
        if (!(in >> v)) return false;
    return true;
}

void store_reference(const std::string& path, const std::string& header, const NodalFunction& u) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(path).parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) raise(Errc::io, "cannot write reference cache " + tmp);
        out << header << "\n";
        char buf[64];
        for (double v : u.values) {
            std::snprintf(buf, sizeof(buf), "%.17g\n", v);
            out << buf;
        }
    }
    fs::rename(tmp, path);
}

// proximal reference loop: restart-FISTA until the relative energy change
// stays below 1e-15 for a stretch of iterations
std::vector<double> reference_afgm(const CompositeProblem& prob, double offset, double lipschitz) {
    const std::size_t n = static_cast<std::size_t>(prob.dim());
    std::vector<double> x(n, 0.0), y(n, 0.0), g(n), z(n), x_new(n);
    const double step = 1.0 / lipschitz;
    double t = 1.0;
    double F_prev = offset + prob.objective(x.data());
    int calm = 0;
    const int max_iter = 1000000;
    for (int k = 1; k <= max_iter; ++k) {
        prob.smooth_gradient(y.data(), g.data());
        combine(y.data(), -step, g.data(), z.data(), n);
        prob.prox(step, z.data(), x_new.data());
        double rdot = 0.0;
        for (std::size_t i = 0; i < n; ++i) rdot += (y[i] - x_new[i]) * (x_new[i] - x[i]);
        if (rdot > 0.0) {
            t = 1.0;
            y = x_new;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double nu = (t - 1.0) / t_next;
            for (std::size_t i = 0; i < n; ++i) y[i] = x_new[i] + nu * (x_new[i] - x[i]);
            t = t_next;
        }
        const double F_new = offset + prob.objective(x_new.data());
        x.swap(x_new);
        const double denom = std::fabs(F_new) < 1e-300 ? 1.0 : std::fabs(F_new);
        calm = std::fabs(F_new - F_prev) / denom < 1e-15 ? calm + 1 : 0;
        F_prev = F_new;
        if (calm >= 20) return x;
    }
    raise(Errc::max_iterations, "proximal reference solve did not settle");
}

}  // namespace

std::string reference_cache_tag(const StructuredMesh& mesh, const NonlinearModel& model) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "ref-cache v1 %s %016llx %d", family_name(model.family),
                  static_cast<unsigned long long>(fnv1a(params_string(mesh, model))), mesh.n());
    return buf;
}

NodalFunction reference_solution(const StructuredMesh& mesh, const NonlinearModel& model,
                                 const std::string& cache_dir) {
    const std::string header = reference_cache_tag(mesh, model);
    std::string path;
    if (!cache_dir.empty()) {
        char name[160];
        std::snprintf(name, sizeof(name), "ref-%s-%016llx-%d.txt", family_name(model.family),
                      static_cast<unsigned long long>(fnv1a(params_string(mesh, model))), mesh.n());
        path = cache_dir + "/" + name;
        NodalFunction cached(mesh);
        if (load_reference(path, header, cached)) return cached;
    }

    const SparseSymmetricOperator A = assemble_stiffness(mesh);
    const SeparableTerm G_all = full_term(mesh, model);
    const SeparableTerm G_int = interior_term(mesh, model);
    NodalFunction zero(mesh);
    const double offset = G_all.sum(zero.values.data());
    const std::size_t nd = static_cast<std::size_t>(mesh.interior_count());
    std::vector<double> zeros(nd, 0.0);

    NodalFunction u(mesh);
    if (model.smooth) {
        BoxProblem bp(A, zeros, G_int, zeros);
        std::vector<double> w(nd, 0.0);
        SolverReport rep;
        std::tie(w, rep) = damped_newton(bp, offset, std::move(w), 1e-14, 500);
        // The energy criterion saturates at rounding level while the gradient
        // can still be polished; finish with plain full Newton steps, which
        // contract it quadratically to the evaluation noise floor.
        bool ok = false;
        std::vector<double> g(nd), p(nd);
        for (int polish = 0; polish < 12 && !ok; ++polish) {
            bp.gradient(w.data(), g.data());
            ok = std::sqrt(dot(g.data(), g.data(), nd)) < 1e-12;
            if (ok) break;
            BandedCholesky chol = bp.hessian_factor(w.data());
            for (std::size_t i = 0; i < nd; ++i) p[i] = -g[i];
            chol.solve(p.data(), p.data());
            axpy(1.0, p.data(), w.data(), nd);
        }
        if (!ok)
            raise(Errc::max_iterations,
                  "reference Newton solve: gradient norm stayed above 1e-12 on " +
                      params_string(mesh, model));
        u = scatter_interior(mesh, w);
    } else {
        LocalComposite lc(A, zeros, G_int, zeros);
        const double lip = estimate_lipschitz(
            [&A](const double* in, double* out) { A.apply(in, out); }, A.dim());
        u = scatter_interior(mesh, reference_afgm(lc, offset, lip));
    }

    if (!path.empty()) store_reference(path, header, u);
    return u;
}

}  // namespace schwarzlin
