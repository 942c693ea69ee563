#pragma once

namespace lamtrack {

using Length = double;

// Bounded-geometry constant: every cuff length lies in [1/M, M].
struct BoundM {
    double M;

    explicit BoundM(double m);
    double lower() const { return 1.0 / M; }
    double upper() const { return M; }
    bool admits(Length len) const;
};

// Length of the common perpendicular between the a- and b-sides of a
// right-angled hexagon whose alternate sides are a, b, c (c = 0 is an ideal vertex).
// cosh u = (cosh c + cosh a cosh b) / (sinh a sinh b)
Length hexagon_orthogeodesic(Length a, Length b, Length c);

// Right-angled pentagon: solves tanh(l2) * cosh(h) * tanh(x) = 1 for x.
Length pentagon_solve(Length l2, Length h);

// cosh c = cosh a cosh b
Length right_triangle_hypotenuse(Length a, Length b);

// Trirectangle with one ideal vertex: sinh a sinh b = 1.
Length lambert_ideal_side(Length a);

// Depth of the finite vertex of an ideal-vertex Lambert quadrilateral with finite
// side a below the horocycle of length 1/2.
double lambert_max_depth(Length a);

// Hyperbolic distance between the endpoints of a horocyclic arc of length s.
Length horocyclic_to_hyperbolic(double s);

}  // namespace lamtrack
