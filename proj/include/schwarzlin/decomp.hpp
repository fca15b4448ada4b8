#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "schwarzlin/fem.hpp"
#include "schwarzlin/mesh.hpp"

namespace schwarzlin {

/// Closed range of grid vertex indices [x0, x1] x [y0, y1].
struct IndexBox {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    int size() const { return width() * height(); }
    bool contains(int i, int j) const { return i >= x0 && i <= x1 && j >= y0 && j <= y1; }
    bool intersects(const IndexBox& o) const {
        return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
    }
};

/// One overlapping subdomain Omega_k': a coarse-cell core dilated by
/// overlap_layers fine cells and clipped to the domain. Its dof set is the
/// fine vertices strictly inside the extended box (all of which are interior
/// to Omega as well), carrying the local space S_h(Omega_k').
struct Subdomain {
    int cell_a = 0, cell_b = 0;  // core coarse-cell coordinates
    IndexBox cover;              // closed vertex box of Omega_k'
    IndexBox dofs;               // vertices strictly inside the box
    int color = 0;
    std::vector<double> theta;   // partition-of-unity values over cover (row-major)

    double theta_at(int i, int j) const {
        if (!cover.contains(i, j)) return 0.0;
        return theta[(j - cover.y0) * cover.width() + (i - cover.x0)];
    }
    int dof_count() const { return dofs.size(); }
};

/// Coarse space S_H(Omega) on a nested coarser triangulation, with its
/// assembled stiffness.
struct CoarseLevel {
    StructuredMesh mesh;
    SparseSymmetricOperator stiffness;
};

struct DomainDecomposition {
    StructuredMesh fine;
    StructuredMesh coarse_mesh;  // defines the nonoverlapping cores
    int overlap_layers = 0;
    std::vector<Subdomain> subdomains;
    std::optional<CoarseLevel> coarse;

    DomainDecomposition(StructuredMesh f, StructuredMesh c)
        : fine(std::move(f)), coarse_mesh(std::move(c)) {}

    int refinement() const { return fine.n() / coarse_mesh.n(); }
    double delta() const { return overlap_layers * fine.h(); }
    int count() const { return static_cast<int>(subdomains.size()); }
    bool two_level() const { return coarse.has_value(); }
};

/// N = coarse.n^2 subdomains, one per coarse cell; overlap_layers fine-cell
/// dilation; coarse level attached iff two_level. Validates the 2x2
/// checkerboard coloring (throws coloring_violation when overlaps make
/// same-color subdomains interact).
DomainDecomposition build_decomposition(const StructuredMesh& fine, const StructuredMesh& coarse,
                                        int overlap_layers, bool two_level);

/// Trivial one-subdomain decomposition (V_1 = S_h(Omega)); the local problem
/// equals the global one.
DomainDecomposition single_subdomain_decomposition(const StructuredMesh& fine);

/// Fill theta on every subdomain: theta_k = d_k / sum_j d_j where d_k is the
/// layer distance to the exterior of Omega_k' (capped at overlap_layers,
/// faces on the domain boundary do not count as exterior). Satisfies the
/// partition-of-unity identities exactly at vertices.
void build_partition_of_unity(DomainDecomposition& dd);

/// 2x2-periodic checkerboard colors; validates that same-color subdomains
/// neither share dofs nor couple through the stiffness.
std::vector<int> color_subdomains(const DomainDecomposition& dd);

std::vector<double> restrict_to(const Subdomain& sd, const NodalFunction& u);
NodalFunction extend_by_zero(const StructuredMesh& fine, const Subdomain& sd,
                             const std::vector<double>& local);
/// into += scale * extend(local); the accumulation path of the Schwarz update.
void add_extended(const StructuredMesh& fine, const Subdomain& sd,
                  const std::vector<double>& local, double scale, NodalFunction& into);

/// Barycentric support of a fine vertex in the coarse triangulation: up to
/// three coarse interior dofs with weights (dof = -1 marks a boundary coarse
/// vertex, whose coefficient is zero).
struct CoarseSupport {
    int dof[3];
    double lambda[3];
};
CoarseSupport coarse_support(const StructuredMesh& coarse, int s, int fi, int fj);

/// Evaluate the coarse P1 function (interior-dof coefficients) at fine
/// vertices. Exact since the meshes are nested.
NodalFunction prolongate(const CoarseLevel& cl, const StructuredMesh& fine,
                         const std::vector<double>& coarse_dofs);

/// Exact adjoint of prolongate: <P c, r>_fine = <c, P^T r>_coarse.
std::vector<double> coarse_gradient_transpose(const CoarseLevel& cl, const StructuredMesh& fine,
                                              const NodalFunction& fine_residual);

/// Nonlinear positivity-preserving interpolation J_H: coarse value at x^i is
/// max{m_i, 0} + min{M_i, 0} with m_i, M_i the min/max of u over the fine
/// vertices of the coarse-element patch around x^i.
std::vector<double> coarse_interpolate_JH(const CoarseLevel& cl, const StructuredMesh& fine,
                                          const NodalFunction& u);

/// w_k = I_h(theta_k w); sum of extensions reconstructs w exactly.
std::vector<std::vector<double>> stable_decomposition_one_level(const DomainDecomposition& dd,
                                                                const NodalFunction& w);

/// w_0 = J_H w, w_k = I_h(theta_k (w - P w_0)).
std::pair<std::vector<double>, std::vector<std::vector<double>>> stable_decomposition_two_level(
    const DomainDecomposition& dd, const NodalFunction& w);

}  // namespace schwarzlin
