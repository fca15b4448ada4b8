#pragma once

#include <vector>

namespace schwarzlin {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform triangulation of the unit square: n x n congruent grid squares,
/// each split along the lower-left -> upper-right diagonal into two right
/// triangles of area h^2/2, h = 1/n. Vertices are implicit grid points
/// (i, j) with 0 <= i, j <= n; nothing geometric is stored, so patch and
/// overlap predicates stay in exact integer arithmetic.
///
/// The single global diagonal direction makes any coarser mesh whose n
/// divides this one a sub-triangulation, which the two-level method needs.
class StructuredMesh {
public:
    explicit StructuredMesh(int n);

    int n() const { return n_; }
    double h() const { return 1.0 / n_; }
    int vertex_count() const { return (n_ + 1) * (n_ + 1); }
    int element_count() const { return 2 * n_ * n_; }
    int interior_count() const { return (n_ - 1) * (n_ - 1); }

    int vertex_id(int i, int j) const { return j * (n_ + 1) + i; }
    bool is_boundary(int i, int j) const { return i == 0 || j == 0 || i == n_ || j == n_; }

    /// Contiguous dof index of interior vertex (i, j), -1 for boundary vertices.
    int interior_index(int i, int j) const {
        return is_boundary(i, j) ? -1 : (j - 1) * (n_ - 1) + (i - 1);
    }

    Vec2 coords(int i, int j) const { return {i * h(), j * h()}; }

    /// Trapezoidal-rule weight per vertex id: w_x = sum of |T|/3 over incident
    /// elements. Sums to |Omega| = 1 over all vertices.
    std::vector<double> nodal_weights() const;

private:
    int n_;
};

StructuredMesh build_uniform_mesh(int n);

/// fine.n / coarse.n; errors unless coarse divides fine (nested meshes).
int refinement_factor(const StructuredMesh& fine, const StructuredMesh& coarse);

/// Coefficient vector over all vertices of a mesh, representing a continuous
/// piecewise-linear function. Members of S_h additionally vanish on the
/// boundary; operations that require this enforce it themselves.
struct NodalFunction {
    int n = 0;
    std::vector<double> values;

    NodalFunction() = default;
    explicit NodalFunction(const StructuredMesh& mesh)
        : n(mesh.n()), values(static_cast<std::size_t>(mesh.vertex_count()), 0.0) {}

    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * (n + 1) + i]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * (n + 1) + i]; }
};

/// Gather interior-dof entries of a nodal function into a contiguous vector.
std::vector<double> gather_interior(const StructuredMesh& mesh, const NodalFunction& u);

/// Scatter an interior-dof vector into a nodal function (boundary zero).
NodalFunction scatter_interior(const StructuredMesh& mesh, const std::vector<double>& dofs);

}  // namespace schwarzlin
