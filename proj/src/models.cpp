#include "schwarzlin/models.hpp"

#include <cmath>
#include <string>

#include "schwarzlin/errors.hpp"

namespace schwarzlin {

namespace {
constexpr double kOverflowArg = 700.0;   // cosh/sinh overflow guard on alpha*y
constexpr double kOverflowValue = 1e300;

inline double intpow(double base, int m) {
    double r = 1.0;
    while (m > 0) {
        if (m & 1) r *= base;
        base *= base;
        m >>= 1;
    }
    return r;
}
}  // namespace

const char* family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::monomial: return "monomial";
        case ModelFamily::poisson_boltzmann: return "pb";
        case ModelFamily::l1: return "l1";
    }
    return "?";
}

double NonlinearModel::phi0(double y) const {
    switch (family) {
        case ModelFamily::monomial: {
            double v = (alpha / m) * intpow(std::fabs(y), m);
            if (v > kOverflowValue)
                raise(Errc::numeric_overflow, "monomial phi exceeds 1e300 at y = " + std::to_string(y));
            return v;
        }
        case ModelFamily::poisson_boltzmann: {
            if (std::fabs(alpha * y) > kOverflowArg)
                raise(Errc::numeric_overflow,
                      "cosh argument |alpha*y| > 700 (alpha*y = " + std::to_string(alpha * y) + ")");
            return std::cosh(alpha * y) / alpha;
        }
        case ModelFamily::l1: return alpha * std::fabs(y);
    }
    return 0.0;
}

double NonlinearModel::dphi0(double y) const {
    switch (family) {
        case ModelFamily::monomial: {
            double v = alpha * intpow(std::fabs(y), m - 2) * y;
            if (std::fabs(v) > kOverflowValue)
                raise(Errc::numeric_overflow, "monomial dphi exceeds 1e300 at y = " + std::to_string(y));
            return v;
        }
        case ModelFamily::poisson_boltzmann:
            if (std::fabs(alpha * y) > kOverflowArg)
                raise(Errc::numeric_overflow,
                      "sinh argument |alpha*y| > 700 (alpha*y = " + std::to_string(alpha * y) + ")");
            return std::sinh(alpha * y);
        case ModelFamily::l1:
            raise(Errc::unsupported_operation, "l1 model has no derivative");
    }
    return 0.0;
}

double NonlinearModel::d2phi0(double y) const {
    switch (family) {
        case ModelFamily::monomial: return alpha * (m - 1) * intpow(std::fabs(y), m - 2);
        case ModelFamily::poisson_boltzmann:
            if (std::fabs(alpha * y) > kOverflowArg)
                raise(Errc::numeric_overflow,
                      "cosh argument |alpha*y| > 700 (alpha*y = " + std::to_string(alpha * y) + ")");
            return alpha * std::cosh(alpha * y);
        case ModelFamily::l1:
            raise(Errc::unsupported_operation, "l1 model has no second derivative");
    }
    return 0.0;
}

double NonlinearModel::dphi(Vec2 p, double y) const { return dphi0(y) - load(p.x, p.y); }

double NonlinearModel::d2phi(Vec2, double y) const { return d2phi0(y); }

double NonlinearModel::prox(Vec2 p, double weight, double step, double z) const {
    if (family != ModelFamily::l1)
        raise(Errc::unsupported_operation,
              std::string("prox not defined for ") + family_name(family));
    // Absorb the linear -g(x) y term into the quadratic side, then
    // soft-threshold the pure alpha|y| part.
    const double shifted = z + step * weight * load(p.x, p.y);
    const double tau = step * weight * alpha;
    const double a = std::fabs(shifted) - tau;
    return a > 0.0 ? std::copysign(a, shifted) : 0.0;
}

NonlinearModel monomial_model(double alpha, int m, ScalarField g) {
    if (alpha < 0.0) raise(Errc::usage, "monomial model needs alpha >= 0");
    if (m < 2) raise(Errc::usage, "monomial model needs m >= 2");
    NonlinearModel model;
    model.family = ModelFamily::monomial;
    model.alpha = alpha;
    model.m = m;
    model.load = std::move(g);
    model.smooth = true;
    return model;
}

NonlinearModel poisson_boltzmann_model(double alpha, ScalarField g) {
    if (alpha <= 0.0) raise(Errc::usage, "poisson-boltzmann model needs alpha > 0");
    NonlinearModel model;
    model.family = ModelFamily::poisson_boltzmann;
    model.alpha = alpha;
    model.load = std::move(g);
    model.smooth = true;
    return model;
}

NonlinearModel l1_model(double alpha, ScalarField g) {
    if (alpha <= 0.0) raise(Errc::usage, "l1 model needs alpha > 0");
    NonlinearModel model;
    model.family = ModelFamily::l1;
    model.alpha = alpha;
    model.load = std::move(g);
    model.smooth = false;
    return model;
}

double manufactured_solution(double x, double y) { return x * (1.0 - x) * std::sin(M_PI * y); }

Vec2 manufactured_solution_gradient(double x, double y) {
    return {(1.0 - 2.0 * x) * std::sin(M_PI * y), M_PI * x * (1.0 - x) * std::cos(M_PI * y)};
}

ScalarField manufactured_rhs(ModelFamily family, double alpha, int m) {
    // -Laplace(u*) = (2 + pi^2 x(1-x)) sin(pi y)
    auto neg_laplace = [](double x, double y) {
        return (2.0 + M_PI * M_PI * x * (1.0 - x)) * std::sin(M_PI * y);
    };
    switch (family) {
        case ModelFamily::monomial:
            return [neg_laplace, alpha, m](double x, double y) {
                const double u = manufactured_solution(x, y);
                return neg_laplace(x, y) + alpha * intpow(std::fabs(u), m - 2) * u;
            };
        case ModelFamily::poisson_boltzmann:
            return [neg_laplace, alpha](double x, double y) {
                return neg_laplace(x, y) + std::sinh(alpha * manufactured_solution(x, y));
            };
        case ModelFamily::l1:
            raise(Errc::unsupported_operation, "l1 experiments use the explicit load, not a manufactured one");
    }
    return {};
}

ScalarField l1_load() {
    return [](double x, double y) { return 1e3 * x * (1.0 - x) * std::sin(M_PI * y); };
}

ScalarField zero_field() {
    return [](double, double) { return 0.0; };
}

}  // namespace schwarzlin
