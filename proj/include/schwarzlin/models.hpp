#pragma once

#include <functional>

#include "schwarzlin/mesh.hpp"

namespace schwarzlin {

/// Pointwise scalar field over the domain, evaluated at coordinates.
using ScalarField = std::function<double(double, double)>;

enum class ModelFamily { monomial, poisson_boltzmann, l1 };

const char* family_name(ModelFamily f);

/// Convex nonlinearity phi(x, y) of the energy density, of the common shape
/// phi(x, y) = phi0(y) - g(x) y with an x-independent convex core phi0 and a
/// load g. dphi/d2phi are the y-derivatives (absent for the nonsmooth L1
/// family, which carries a proximal map instead).
class NonlinearModel {
public:
    ModelFamily family;
    double alpha = 0.0;
    int m = 0;  // monomial exponent
    ScalarField load;
    bool smooth = true;

    double phi(Vec2 p, double y) const { return phi0(y) - load(p.x, p.y) * y; }
    double dphi(Vec2 p, double y) const;   // f = d(phi)/dy; unsupported for l1
    double d2phi(Vec2 p, double y) const;  // >= 0 by convexity; unsupported for l1
    bool has_prox() const { return family == ModelFamily::l1; }

    /// argmin_p [ weight * phi(x, p) + (p - z)^2 / (2 step) ]
    double prox(Vec2 p, double weight, double step, double z) const;

    // x-independent pieces, used by the batched evaluation paths
    double phi0(double y) const;
    double dphi0(double y) const;
    double d2phi0(double y) const;
};

/// phi = (alpha/m)|y|^m - g(x) y, the family of -Laplace u + alpha|u|^{m-2}u = g.
NonlinearModel monomial_model(double alpha, int m, ScalarField g);

/// phi = (1/alpha) cosh(alpha y) - g(x) y, the family of -Laplace u + sinh(alpha u) = g.
NonlinearModel poisson_boltzmann_model(double alpha, ScalarField g);

/// phi = alpha |y| - g(x) y (nonsmooth; proximal map only).
NonlinearModel l1_model(double alpha, ScalarField g);

/// u*(x,y) = x(1-x) sin(pi y), the manufactured solution of the smooth experiments.
double manufactured_solution(double x, double y);
Vec2 manufactured_solution_gradient(double x, double y);

/// Load g with u* as the exact solution: g = -Laplace(u*) + f0(u*), where f0
/// is the nonlinearity with the load removed.
ScalarField manufactured_rhs(ModelFamily family, double alpha, int m);

/// g(x,y) = 1000 x (1-x) sin(pi y), the load of the L1-penalized experiments.
ScalarField l1_load();

ScalarField zero_field();

}  // namespace schwarzlin
