#include "schwarzlin/mesh.hpp"

#include <string>

#include "schwarzlin/errors.hpp"

namespace schwarzlin {

StructuredMesh::StructuredMesh(int n) : n_(n) {
    if (n < 2) raise(Errc::invalid_mesh, "need n >= 2, got n = " + std::to_string(n));
}

StructuredMesh build_uniform_mesh(int n) { return StructuredMesh(n); }

int refinement_factor(const StructuredMesh& fine, const StructuredMesh& coarse) {
    if (fine.n() % coarse.n() != 0)
        raise(Errc::incompatible_meshes, "coarse n = " + std::to_string(coarse.n()) +
                                             " does not divide fine n = " +
                                             std::to_string(fine.n()));
    return fine.n() / coarse.n();
}

std::vector<double> StructuredMesh::nodal_weights() const {
    // Accumulate |T|/3 from every element onto its three vertices. Square
    // (p, q) splits into the lower triangle {(p,q),(p+1,q),(p+1,q+1)} and the
    // upper triangle {(p,q),(p+1,q+1),(p,q+1)}.
    std::vector<double> w(static_cast<std::size_t>(vertex_count()), 0.0);
    const double contrib = h() * h() / 6.0;  // |T|/3 = (h^2/2)/3
    for (int q = 0; q < n_; ++q) {
        for (int p = 0; p < n_; ++p) {
            w[vertex_id(p, q)] += 2.0 * contrib;
            w[vertex_id(p + 1, q)] += contrib;
            w[vertex_id(p + 1, q + 1)] += 2.0 * contrib;
            w[vertex_id(p, q + 1)] += contrib;
        }
    }
    return w;
}

std::vector<double> gather_interior(const StructuredMesh& mesh, const NodalFunction& u) {
    const int n = mesh.n();
    std::vector<double> out(static_cast<std::size_t>(mesh.interior_count()));
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) out[mesh.interior_index(i, j)] = u.at(i, j);
    return out;
}

NodalFunction scatter_interior(const StructuredMesh& mesh, const std::vector<double>& dofs) {
    NodalFunction u(mesh);
    const int n = mesh.n();
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) u.at(i, j) = dofs[mesh.interior_index(i, j)];
    return u;
}

}  // namespace schwarzlin
