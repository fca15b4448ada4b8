#pragma once

#include <memory>
#include <vector>

#include "schwarzlin/mesh.hpp"
#include "schwarzlin/models.hpp"

namespace schwarzlin {

/// Cholesky factor of a symmetric positive-definite band matrix
/// (LAPACK dpbtrf/dpbtrs behind the scenes).
class BandedCholesky {
public:
    BandedCholesky(int dim, int kd, std::vector<double> lower_band_colmajor);
    void solve(const double* rhs, double* x) const;
    void solve_inplace(std::vector<double>& b) const;
    int dim() const { return dim_; }

private:
    int dim_;
    int kd_;
    std::vector<double> ab_;  // factored band, column-major, ldab = kd+1
};

/// General symmetric band matrix in LAPACK lower storage, used where the
/// sparsity exceeds the stiffness pattern (coarse-space Newton Hessians).
class BandedMatrix {
public:
    BandedMatrix(int dim, int kd);
    void add(int i, int j, double v);  // symmetric: pass any (i, j) within the band
    BandedCholesky factor() const;     // throws convexity_violation if not SPD
    int dim() const { return dim_; }
    int kd() const { return kd_; }

private:
    int dim_;
    int kd_;
    std::vector<double> ab_;
};

/// Symmetric sparse operator over the interior dofs of a rectangular cell box,
/// assembled from P1 elements. On this triangulation the pattern is
/// pentadiagonal: main diagonal plus couplings at offsets 1 and nx.
/// Supports matrix-vector products, diagonal updates, and SPD factorization.
class SparseSymmetricOperator {
public:
    /// Element-loop assembly of the Dirichlet stiffness on a box of
    /// cells_x * cells_y grid squares (dof grid (cells_x-1) * (cells_y-1)).
    static SparseSymmetricOperator assemble_box(int cells_x, int cells_y);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int dim() const { return nx_ * ny_; }

    void apply(const double* x, double* y) const;
    double quad_form(const double* x) const;  // x^T A x
    double entry(int row, int col) const;     // dense view, for tests
    double symmetry_defect() const;           // always 0 for band storage

    /// Factor A + diag(extra); extra may be null.
    BandedCholesky factor(const double* extra_diag = nullptr) const;

    /// Copy into general band storage with bandwidth kd >= nx (for operators
    /// that subsequently receive wider couplings).
    BandedMatrix to_banded(int kd) const;

    void add_diagonal(const double* extra);
    const std::vector<double>& diagonal() const { return diag_; }

private:
    SparseSymmetricOperator(int nx, int ny);
    int nx_, ny_;
    std::vector<double> diag_, off_x_, off_y_;
};

/// Stiffness a(u,v) = integral of grad u . grad v over the interior dofs of a mesh.
SparseSymmetricOperator assemble_stiffness(const StructuredMesh& mesh);

/// Trapezoidal-rule nonlinearity restricted to a vertex subset: holds the
/// nodal weights w_x, load values g_x and the model parameters, and evaluates
/// sums / gradients / Hessian diagonals in batch. Overflow in a batched sum
/// yields +inf rather than throwing (line searches treat that as a rejected
/// trial); the pointwise model interface is the throwing one.
class SeparableTerm {
public:
    SeparableTerm() = default;
    SeparableTerm(const NonlinearModel& model, std::vector<double> weights,
                  std::vector<double> loads);

    std::size_t size() const { return w_.size(); }
    const std::vector<double>& weights() const { return w_; }
    const std::vector<double>& weighted_loads() const { return wg_; }

    double sum(const double* y) const { return sum_line(y, nullptr, 0.0); }
    /// sum_i w_i phi(x_i, b_i + t d_i); d may be null
    double sum_line(const double* b, const double* d, double t) const;
    /// sum_i w_i [phi(x_i, b_i + t d_i) - phi(x_i, b_i)], accumulated as
    /// per-vertex differences so the result stays accurate when the
    /// increment is far below the magnitude of the sum itself (the line
    /// searches live on such increments).
    double sum_line_delta(const double* b, const double* d, double t) const;
    /// out_i += w_i f(x_i, y_i)
    void add_grad(const double* y, double* out) const;
    /// out_i += w_i f'(x_i, y_i)
    void add_hess_diag(const double* y, double* out) const;
    /// componentwise prox of step * w_i phi(x_i, .) evaluated at z
    void prox(double step, const double* z, double* out) const;
    bool smooth() const { return smooth_; }
    ModelFamily family() const { return family_; }
    double alpha() const { return alpha_; }

private:
    ModelFamily family_ = ModelFamily::monomial;
    double alpha_ = 0.0;
    int m_ = 2;
    bool smooth_ = true;
    std::vector<double> w_, g_, wg_;
};

/// Nonlinearity term over all vertices of the mesh (the G_h of the energy).
SeparableTerm full_term(const StructuredMesh& mesh, const NonlinearModel& model);
/// Same, restricted to interior vertices in dof order.
SeparableTerm interior_term(const StructuredMesh& mesh, const NonlinearModel& model);

/// E_h(u) = 1/2 a(u,u) + sum over all vertices of w_x phi(x, u(x)).
/// Throws numeric_overflow (identifying the vertex) on non-finite phi.
double energy(const StructuredMesh& mesh, const NonlinearModel& model, const NodalFunction& u);
double energy(const StructuredMesh& mesh, const NonlinearModel& model, const NodalFunction& u,
              const SparseSymmetricOperator& stiffness);

/// Exact gradient of energy() over interior dofs: A u + w o f(., u).
std::vector<double> gradient(const StructuredMesh& mesh, const NonlinearModel& model,
                             const NodalFunction& u);

/// A + diag(w_x f'(x, u(x))) over interior dofs.
SparseSymmetricOperator hessian(const StructuredMesh& mesh, const NonlinearModel& model,
                                const NodalFunction& u);

/// Nodal interpolation: values at vertex coordinates (boundary not zeroed).
NodalFunction interpolate(const StructuredMesh& mesh, const ScalarField& f);

using VectorField = std::function<Vec2(double, double)>;

/// |u - u*|_{H^1} seminorm by the 3-point edge-midpoint rule per element.
double h1_seminorm_error(const StructuredMesh& mesh, const NodalFunction& u,
                         const VectorField& exact_grad);
/// Full H^1 norm of the error (seminorm plus L^2 part, same quadrature).
double h1_error(const StructuredMesh& mesh, const NodalFunction& u, const ScalarField& exact,
                const VectorField& exact_grad);
/// ||u - exact||_{L^1} by the same rule.
double l1_error(const StructuredMesh& mesh, const NodalFunction& u, const ScalarField& exact);

}  // namespace schwarzlin
