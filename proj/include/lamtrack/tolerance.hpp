#pragma once

namespace lamtrack {

// Geometric predicate tolerance. Initialised from LAMTRACK_TOL when set.
double tolerance();
void set_tolerance(double eps);

inline constexpr double kIdentityTol = 1e-12;

}  // namespace lamtrack
