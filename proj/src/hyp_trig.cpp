#include "lamtrack/hyp_trig.hpp"

#include <cmath>
#include <string>

#include "lamtrack/errors.hpp"
#include "lamtrack/tolerance.hpp"

namespace lamtrack {

namespace {

double nonneg(double x, const char* what) {
    if (std::isnan(x)) throw DomainError(std::string(what) + " is NaN");
    if (x < 0) {
        if (x < -tolerance()) throw DomainError(std::string(what) + " must be >= 0");
        return 0.0;
    }
    return x;
}

double positive(double x, const char* what) {
    x = nonneg(x, what);
    if (x == 0.0) throw DomainError(std::string(what) + " must be > 0");
    return x;
}

// acosh(1 + t) without cancellation for small t
double acosh1p(double t) { return std::log1p(t + std::sqrt(t * (t + 2.0))); }

}  // namespace

BoundM::BoundM(double m) : M(m) {
    if (!(m >= 1.0)) throw DomainError("bound M must be >= 1");
}

bool BoundM::admits(Length len) const {
    double eps = tolerance();
    return len >= lower() - eps && len <= upper() + eps;
}

Length hexagon_orthogeodesic(Length a, Length b, Length c) {
    a = positive(a, "a");
    b = positive(b, "b");
    c = nonneg(c, "c");
    // cosh u - 1 = (cosh c + cosh(a - b)) / (sinh a sinh b)
    double t = (std::cosh(c) + std::cosh(a - b)) / (std::sinh(a) * std::sinh(b));
    return acosh1p(t);
}

Length pentagon_solve(Length l2, Length h) {
    l2 = positive(l2, "l2");
    h = nonneg(h, "h");
    double p = std::tanh(l2) * std::cosh(h);
    if (p <= 1.0) throw Infeasible("tanh(l2) cosh(h) <= 1");
    return std::atanh(1.0 / p);
}

Length right_triangle_hypotenuse(Length a, Length b) {
    a = nonneg(a, "a");
    b = nonneg(b, "b");
    // cosh c - 1 = (cosh a - 1) cosh b + (cosh b - 1)
    double ca = 2.0 * std::sinh(a / 2) * std::sinh(a / 2);
    double cb = 2.0 * std::sinh(b / 2) * std::sinh(b / 2);
    return acosh1p(ca * std::cosh(b) + cb);
}

Length lambert_ideal_side(Length a) {
    a = positive(a, "a");
    return std::asinh(1.0 / std::sinh(a));
}

double lambert_max_depth(Length a) {
    a = positive(a, "a");
    double r = std::tanh(a);
    double y0 = r * std::sqrt(1.0 - r * r);
    return std::log(2.0 / y0);
}

Length horocyclic_to_hyperbolic(double s) {
    if (std::isnan(s) || s <= 0) throw DomainError("horocyclic length must be > 0");
    return 2.0 * std::asinh(s / 2.0);
}

}  // namespace lamtrack
