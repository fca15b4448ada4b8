#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "schwarzlin/decomp.hpp"
#include "schwarzlin/fem.hpp"

namespace schwarzlin {

enum class Termination { tolerance, max_iterations, line_search_failure };

struct SolverReport {
    int iterations = 0;
    double final_objective = 0.0;
    Termination reason = Termination::tolerance;
    int max_inner = 0;  // max inner-solver iterations observed (outer-level aggregation)
};

// ---------------------------------------------------------------------------
// subspace problems

/// Smooth subspace energy F0 + Phi(w) handed to the damped Newton solver.
/// Phi is convex with a sparse SPD Hessian reachable through a band factor.
class NewtonProblem {
public:
    virtual ~NewtonProblem() = default;
    virtual int dim() const = 0;
    virtual double value(const double* w) const = 0;
    virtual void gradient(const double* w, double* g) const = 0;
    virtual BandedCholesky hessian_factor(const double* w) const = 0;
    /// Decrement along a direction, t -> Phi(w + t p) - Phi(w), evaluated
    /// without cancellation against the magnitude of Phi itself.
    virtual std::function<double(double)> line(const double* w, const double* p) const = 0;
};

/// w -> 1/2 w^T A w + r^T w + sum_i w_i phi(x_i, v_i + w_i): the local
/// problems of the Schwarz iteration and the full-space problem alike.
class BoxProblem final : public NewtonProblem {
public:
    BoxProblem(const SparseSymmetricOperator& A, std::vector<double> linear,
               const SeparableTerm& term, std::vector<double> shift);
    int dim() const override { return A_->dim(); }
    double value(const double* w) const override;
    void gradient(const double* w, double* g) const override;
    BandedCholesky hessian_factor(const double* w) const override;
    std::function<double(double)> line(const double* w, const double* p) const override;

private:
    const SparseSymmetricOperator* A_;
    std::vector<double> r_;
    const SeparableTerm* term_;
    std::vector<double> shift_;
    double g0_;  // term value at the shift, subtracted so Phi(0) = 0
};

/// Coarse-space problem c -> 1/2 c^T A0 c + r^T c + G_h(v + P c) - G_h(v);
/// the nonlinearity is evaluated on the fine grid through the prolongation.
class CoarseProblem final : public NewtonProblem {
public:
    CoarseProblem(const CoarseLevel& cl, const StructuredMesh& fine, const SeparableTerm& interior,
                  std::vector<double> linear, std::vector<double> fine_shift);
    int dim() const override { return cl_->stiffness.dim(); }
    double value(const double* c) const override;
    void gradient(const double* c, double* g) const override;
    BandedCholesky hessian_factor(const double* c) const override;
    std::function<double(double)> line(const double* c, const double* p) const override;

private:
    std::vector<double> prolong_interior(const double* c) const;
    const CoarseLevel* cl_;
    const StructuredMesh* fine_;
    const SeparableTerm* term_;  // over interior fine vertices
    std::vector<double> r_;
    std::vector<double> shift_;  // current iterate at interior fine vertices
    double g0_;
    int s_;
};

/// Composite problem for the accelerated proximal method: smooth quadratic
/// part plus a separable prox-friendly part.
class CompositeProblem {
public:
    virtual ~CompositeProblem() = default;
    virtual int dim() const = 0;
    virtual void smooth_gradient(const double* y, double* g) const = 0;
    virtual double objective(const double* y) const = 0;  // smooth + nonsmooth
    virtual void prox(double step, const double* z, double* out) const = 0;
};

/// y -> 1/2 (y-v)^T A (y-v) + r^T (y-v) + sum_i w_i (phi(x_i, y_i) - phi(x_i, v_i)),
/// in the total local variable y; prox comes from the model.
class LocalComposite final : public CompositeProblem {
public:
    LocalComposite(const SparseSymmetricOperator& A, std::vector<double> linear,
                   const SeparableTerm& term, std::vector<double> shift);
    int dim() const override { return A_->dim(); }
    void smooth_gradient(const double* y, double* g) const override;
    double objective(const double* y) const override;
    void prox(double step, const double* z, double* out) const override;

private:
    const SparseSymmetricOperator* A_;
    std::vector<double> r_;
    const SeparableTerm* term_;
    std::vector<double> v_;
    double g0_;
};

// ---------------------------------------------------------------------------
// solvers

/// Damped Newton with Armijo backtracking (slope factor 0.01, halving from
/// t = 1). Stops on |dF/F| < tol, or gradient 2-norm below 1e-14.
std::pair<std::vector<double>, SolverReport> damped_newton(const NewtonProblem& prob,
                                                           double offset,
                                                           std::vector<double> init, double tol,
                                                           int max_iter);

struct AfgmTrace {
    std::vector<double> objectives;  // objective after each accepted iterate (index 0 = init)
    std::vector<int> restarts;       // iteration indices where the momentum was reset
};

/// FISTA with step 1/lipschitz and gradient-based adaptive restart
/// (reset momentum when <y_k - x_{k+1}, x_{k+1} - x_k> > 0).
std::pair<std::vector<double>, SolverReport> afgm(const CompositeProblem& prob, double offset,
                                                  std::vector<double> init, double lipschitz,
                                                  double tol, int max_iter,
                                                  AfgmTrace* trace = nullptr);

using LinearOperator = std::function<void(const double*, double*)>;

/// lambda_max estimate: 100 power iterations from a fixed-seed start vector,
/// times a 1.01 safety factor.
double estimate_lipschitz(const LinearOperator& op, int dim);

/// Reusable pieces of the dual coarse solve: the coarse factorization and the
/// dual step size never change across outer iterations, and the multipliers
/// are warm-started.
struct CoarseDualWorkspace {
    std::shared_ptr<BandedCholesky> factor;
    double lipschitz = 0.0;
    std::vector<double> lambda;  // multipliers over interior fine vertices
};

CoarseDualWorkspace make_coarse_dual_workspace(const CoarseLevel& cl, const StructuredMesh& fine);

/// Solve the nonsmooth coarse problem min_c 1/2 c^T A0 c + r^T c +
/// sum_x w_x alpha |v_x + (Pc)_x| through its Lagrange dual (box-constrained
/// smooth concave maximization by projected fast gradient with restart).
/// Terminates when the primal-dual gap drops below tol * (1 + |primal|).
std::pair<std::vector<double>, SolverReport> coarse_dual_afgm(
    const CoarseLevel& cl, const StructuredMesh& fine, const NodalFunction& v,
    const NonlinearModel& model, const std::vector<double>& linear, double tol, int max_iter,
    CoarseDualWorkspace* ws = nullptr);

/// Convenience overload matching the operation contract: derives the linear
/// term from the current iterate via the fine stiffness.
std::pair<std::vector<double>, SolverReport> coarse_dual_afgm(const CoarseLevel& cl,
                                                              const StructuredMesh& fine,
                                                              const NodalFunction& v,
                                                              const NonlinearModel& model,
                                                              double tol, int max_iter = 500000);

// ---------------------------------------------------------------------------
// outer iteration

enum class LocalSolverKind { automatic, newton, afgm };

struct SchwarzConfig {
    int levels = 1;                    // 1 or 2
    double tau = 0.0;                  // 0 = default (1/4 one-level, 1/5 two-level)
    int outer_iterations = 30;
    double stop_tol = 0.0;             // optional early stop on relative energy change
    LocalSolverKind local_solver = LocalSolverKind::automatic;
    double local_tol = 1e-12;          // relative energy change of the subspace solvers
    int local_max_iter = 200;          // Newton cap; the proximal solvers get a larger one
    unsigned seed = 0;                 // randomized checks only; the solve is deterministic
};

struct SchwarzResult {
    std::vector<double> energies;        // E(u^(0)) .. E(u^(n))
    std::vector<SolverReport> outer;     // per outer iteration (max_inner filled)
    NodalFunction final;
    int max_inner_iterations = 0;        // over the whole run
};

SchwarzResult schwarz_solve(const SchwarzConfig& config, const StructuredMesh& mesh,
                            const NonlinearModel& model, const DomainDecomposition& dd,
                            const NodalFunction& u0);

/// Full-space minimizer, damped Newton (smooth) or AFGM (l1), to
/// near-machine accuracy; disk-cached under cache_dir when non-empty.
NodalFunction reference_solution(const StructuredMesh& mesh, const NonlinearModel& model,
                                 const std::string& cache_dir = {});

/// Cache key of a reference solution (exposed for the cache tooling).
std::string reference_cache_tag(const StructuredMesh& mesh, const NonlinearModel& model);

}  // namespace schwarzlin
