#include "schwarzlin/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "schwarzlin/errors.hpp"

namespace schwarzlin {

DomainDecomposition build_decomposition(const StructuredMesh& fine, const StructuredMesh& coarse,
                                        int overlap_layers, bool two_level) {
    const int s = refinement_factor(fine, coarse);
    if (overlap_layers < 1 || overlap_layers >= s)
        raise(Errc::usage, "need 1 <= overlap_layers < fine.n/coarse.n, got layers = " +
                               std::to_string(overlap_layers) + ", ratio = " + std::to_string(s));

    DomainDecomposition dd(fine, coarse);
    dd.overlap_layers = overlap_layers;
    const int nc = coarse.n();
    const int n = fine.n();
    dd.subdomains.reserve(static_cast<std::size_t>(nc) * nc);
    for (int b = 0; b < nc; ++b) {
        for (int a = 0; a < nc; ++a) {
            Subdomain sd;
            sd.cell_a = a;
            sd.cell_b = b;
            sd.cover = {std::max(a * s - overlap_layers, 0),
                        std::min((a + 1) * s + overlap_layers, n),
                        std::max(b * s - overlap_layers, 0),
                        std::min((b + 1) * s + overlap_layers, n)};
            sd.dofs = {sd.cover.x0 + 1, sd.cover.x1 - 1, sd.cover.y0 + 1, sd.cover.y1 - 1};
            dd.subdomains.push_back(std::move(sd));
        }
    }

    const std::vector<int> colors = color_subdomains(dd);
    for (std::size_t k = 0; k < dd.subdomains.size(); ++k) dd.subdomains[k].color = colors[k];

    if (two_level)
        dd.coarse = CoarseLevel{coarse, assemble_stiffness(coarse)};
    return dd;
}

DomainDecomposition single_subdomain_decomposition(const StructuredMesh& fine) {
    DomainDecomposition dd(fine, fine);
    dd.overlap_layers = 0;
    Subdomain sd;
    sd.cover = {0, fine.n(), 0, fine.n()};
    sd.dofs = {1, fine.n() - 1, 1, fine.n() - 1};
    sd.color = 0;
    sd.theta.assign(static_cast<std::size_t>(sd.cover.size()), 1.0);
    dd.subdomains.push_back(std::move(sd));
    return dd;
}

std::vector<int> color_subdomains(const DomainDecomposition& dd) {
    const int nc = dd.coarse_mesh.n();
    std::vector<int> colors(dd.subdomains.size());
    for (std::size_t k = 0; k < dd.subdomains.size(); ++k) {
        const Subdomain& sd = dd.subdomains[k];
        colors[k] = (sd.cell_a % 2) + 2 * (sd.cell_b % 2);
    }
    if (static_cast<int>(dd.subdomains.size()) <= 1) return colors;

    // Same-color subdomains must neither share dofs nor couple through the
    // stiffness (adjacent dof columns/rows); that is what the coloring step
    // size tau_0 = 1/4 rests on.
    for (std::size_t k = 0; k < dd.subdomains.size(); ++k) {
        for (std::size_t l = k + 1; l < dd.subdomains.size(); ++l) {
            if (colors[k] != colors[l]) continue;
            const IndexBox& a = dd.subdomains[k].dofs;
            const IndexBox& b = dd.subdomains[l].dofs;
            const IndexBox grown{a.x0 - 1, a.x1 + 1, a.y0 - 1, a.y1 + 1};
            if (grown.intersects(b))
                raise(Errc::coloring_violation,
                      "same-color subdomains " + std::to_string(k) + " and " + std::to_string(l) +
                          " interact; shrink the overlap (2*layers <= fine.n/coarse.n required)");
        }
    }
    (void)nc;
    return colors;
}

void build_partition_of_unity(DomainDecomposition& dd) {
    const int n = dd.fine.n();
    const int L = dd.overlap_layers;
    if (L == 0) {  // trivial single-subdomain decomposition
        for (Subdomain& sd : dd.subdomains)
            sd.theta.assign(static_cast<std::size_t>(sd.cover.size()), 1.0 / dd.count());
        return;
    }

    // d_k per subdomain at each cover vertex
    for (Subdomain& sd : dd.subdomains) {
        sd.theta.assign(static_cast<std::size_t>(sd.cover.size()), 0.0);
        for (int j = sd.cover.y0; j <= sd.cover.y1; ++j) {
            for (int i = sd.cover.x0; i <= sd.cover.x1; ++i) {
                // layer distance to the exterior; box faces on the domain
                // boundary are not exterior
                int d = L;
                if (sd.cover.x0 > 0) d = std::min(d, i - sd.cover.x0);
                if (sd.cover.x1 < n) d = std::min(d, sd.cover.x1 - i);
                if (sd.cover.y0 > 0) d = std::min(d, j - sd.cover.y0);
                if (sd.cover.y1 < n) d = std::min(d, sd.cover.y1 - j);
                sd.theta[(j - sd.cover.y0) * sd.cover.width() + (i - sd.cover.x0)] =
                    static_cast<double>(d) / L;
            }
        }
    }

    // normalize: theta_k = d_k / sum_j d_j at every vertex
    std::vector<double> total(static_cast<std::size_t>(dd.fine.vertex_count()), 0.0);
    for (const Subdomain& sd : dd.subdomains)
        for (int j = sd.cover.y0; j <= sd.cover.y1; ++j)
            for (int i = sd.cover.x0; i <= sd.cover.x1; ++i)
                total[dd.fine.vertex_id(i, j)] +=
                    sd.theta[(j - sd.cover.y0) * sd.cover.width() + (i - sd.cover.x0)];
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            if (total[dd.fine.vertex_id(i, j)] <= 0.0)
                raise(Errc::covering_error, "vertex (" + std::to_string(i) + "," +
                                                std::to_string(j) + ") not covered by any d_k");
    for (Subdomain& sd : dd.subdomains)
        for (int j = sd.cover.y0; j <= sd.cover.y1; ++j)
            for (int i = sd.cover.x0; i <= sd.cover.x1; ++i)
                sd.theta[(j - sd.cover.y0) * sd.cover.width() + (i - sd.cover.x0)] /=
                    total[dd.fine.vertex_id(i, j)];
}

std::vector<double> restrict_to(const Subdomain& sd, const NodalFunction& u) {
    std::vector<double> out(static_cast<std::size_t>(sd.dof_count()));
    std::size_t k = 0;
    for (int j = sd.dofs.y0; j <= sd.dofs.y1; ++j)
        for (int i = sd.dofs.x0; i <= sd.dofs.x1; ++i) out[k++] = u.at(i, j);
    return out;
}

NodalFunction extend_by_zero(const StructuredMesh& fine, const Subdomain& sd,
                             const std::vector<double>& local) {
    NodalFunction u(fine);
    add_extended(fine, sd, local, 1.0, u);
    return u;
}

void add_extended(const StructuredMesh& fine, const Subdomain& sd,
                  const std::vector<double>& local, double scale, NodalFunction& into) {
    if (static_cast<int>(local.size()) != sd.dof_count())
        raise(Errc::usage, "local vector size " + std::to_string(local.size()) +
                               " does not match subdomain dof count " +
                               std::to_string(sd.dof_count()));
    (void)fine;
    std::size_t k = 0;
    for (int j = sd.dofs.y0; j <= sd.dofs.y1; ++j)
        for (int i = sd.dofs.x0; i <= sd.dofs.x1; ++i) into.at(i, j) += scale * local[k++];
}

CoarseSupport coarse_support(const StructuredMesh& coarse, int s, int fi, int fj) {
    const int nc = coarse.n();
    const int a = std::min(fi / s, nc - 1);
    const int b = std::min(fj / s, nc - 1);
    const double u = static_cast<double>(fi - a * s) / s;
    const double v = static_cast<double>(fj - b * s) / s;
    CoarseSupport sup;
    if (v <= u) {  // lower triangle {(a,b), (a+1,b), (a+1,b+1)}
        sup.dof[0] = coarse.interior_index(a, b);
        sup.dof[1] = coarse.interior_index(a + 1, b);
        sup.dof[2] = coarse.interior_index(a + 1, b + 1);
        sup.lambda[0] = 1.0 - u;
        sup.lambda[1] = u - v;
        sup.lambda[2] = v;
    } else {  // upper triangle {(a,b), (a+1,b+1), (a,b+1)}
        sup.dof[0] = coarse.interior_index(a, b);
        sup.dof[1] = coarse.interior_index(a + 1, b + 1);
        sup.dof[2] = coarse.interior_index(a, b + 1);
        sup.lambda[0] = 1.0 - v;
        sup.lambda[1] = u;
        sup.lambda[2] = v - u;
    }
    return sup;
}

NodalFunction prolongate(const CoarseLevel& cl, const StructuredMesh& fine,
                         const std::vector<double>& coarse_dofs) {
    const int s = refinement_factor(fine, cl.mesh);
    const int n = fine.n();
    NodalFunction out(fine);
    for (int fj = 0; fj <= n; ++fj) {
        for (int fi = 0; fi <= n; ++fi) {
            const CoarseSupport sup = coarse_support(cl.mesh, s, fi, fj);
            double val = 0.0;
            for (int t = 0; t < 3; ++t)
                if (sup.dof[t] >= 0) val += sup.lambda[t] * coarse_dofs[sup.dof[t]];
            out.at(fi, fj) = val;
        }
    }
    return out;
}

std::vector<double> coarse_gradient_transpose(const CoarseLevel& cl, const StructuredMesh& fine,
                                              const NodalFunction& fine_residual) {
    const int s = refinement_factor(fine, cl.mesh);
    const int n = fine.n();
    std::vector<double> out(static_cast<std::size_t>(cl.mesh.interior_count()), 0.0);
    for (int fj = 0; fj <= n; ++fj) {
        for (int fi = 0; fi <= n; ++fi) {
            const double r = fine_residual.at(fi, fj);
            if (r == 0.0) continue;
            const CoarseSupport sup = coarse_support(cl.mesh, s, fi, fj);
            for (int t = 0; t < 3; ++t)
                if (sup.dof[t] >= 0) out[sup.dof[t]] += sup.lambda[t] * r;
        }
    }
    return out;
}

std::vector<double> coarse_interpolate_JH(const CoarseLevel& cl, const StructuredMesh& fine,
                                          const NodalFunction& u) {
    const int s = refinement_factor(fine, cl.mesh);
    const int nc = cl.mesh.n();
    std::vector<double> out(static_cast<std::size_t>(cl.mesh.interior_count()), 0.0);
    for (int b = 1; b < nc; ++b) {
        for (int a = 1; a < nc; ++a) {
            // patch of the six coarse triangles around coarse vertex (a,b):
            // fine offsets (p,q) from (a*s, b*s) with max(|p|,|q|,|p-q|) <= s
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (int q = -s; q <= s; ++q) {
                for (int p = -s; p <= s; ++p) {
                    if (std::abs(p - q) > s) continue;
                    const double v = u.at(a * s + p, b * s + q);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            out[cl.mesh.interior_index(a, b)] = std::max(lo, 0.0) + std::min(hi, 0.0);
        }
    }
    return out;
}

std::vector<std::vector<double>> stable_decomposition_one_level(const DomainDecomposition& dd,
                                                                const NodalFunction& w) {
    std::vector<std::vector<double>> parts;
    parts.reserve(dd.subdomains.size());
    for (const Subdomain& sd : dd.subdomains) {
        std::vector<double> wk(static_cast<std::size_t>(sd.dof_count()));
        std::size_t k = 0;
        for (int j = sd.dofs.y0; j <= sd.dofs.y1; ++j)
            for (int i = sd.dofs.x0; i <= sd.dofs.x1; ++i)
                wk[k++] = sd.theta_at(i, j) * w.at(i, j);
        parts.push_back(std::move(wk));
    }
    return parts;
}

std::pair<std::vector<double>, std::vector<std::vector<double>>> stable_decomposition_two_level(
    const DomainDecomposition& dd, const NodalFunction& w) {
    if (!dd.coarse) raise(Errc::missing_coarse, "two-level decomposition required");
    std::vector<double> w0 = coarse_interpolate_JH(*dd.coarse, dd.fine, w);
    NodalFunction rest = prolongate(*dd.coarse, dd.fine, w0);
    for (std::size_t k = 0; k < rest.values.size(); ++k)
        rest.values[k] = w.values[k] - rest.values[k];
    return {std::move(w0), stable_decomposition_one_level(dd, rest)};
}

}  // namespace schwarzlin
