#include "lamtrack/tolerance.hpp"

#include <cstdlib>
#include <string>

namespace lamtrack {

namespace {

double initial_tolerance() {
    if (const char* env = std::getenv("LAMTRACK_TOL")) {
        try {
            double v = std::stod(env);
            if (v > 0) return v;
        } catch (...) {
        }
    }
    return 1e-9;
}

double& tol_ref() {
    static double eps = initial_tolerance();
    return eps;
}

}  // namespace

double tolerance() { return tol_ref(); }

void set_tolerance(double eps) { tol_ref() = eps; }

}  // namespace lamtrack
