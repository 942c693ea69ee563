#pragma once

#include <complex>

namespace lamtrack {

using Complex = std::complex<double>;

// Real 2x2 matrix acting on the upper half-plane. det = -1 matrices act
// anti-holomorphically (z -> M zbar); products of two reflections are ordinary.
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }
    // det, taken as 1 when long products of unit-determinant matrices lose it to cancellation
    double stable_det() const;
    double trace() const { return a + d; }
    Mat2 inverse() const;
    Mat2 operator*(const Mat2& o) const;
    bool near(const Mat2& o, double eps) const;  // equality in PGL(2,R)
    bool near_identity(double eps) const { return near(Mat2{}, eps); }
};

Mat2 translation(double d);  // along the imaginary axis, upward
Mat2 rotation(double theta);  // counterclockwise about i
Mat2 reflection_in(const Mat2& frame);  // reflection in the geodesic through a frame

// Ideal points as angles on the unit circle (disk chart, z -> (z - i)/(z + i)).
struct IdealPoint {
    double theta = 0;  // in [0, 2pi)

    static IdealPoint from_angle(double t);
    static IdealPoint from_homogeneous(double v1, double v2);
    static IdealPoint from_real(double x);
    static IdealPoint infinity() { return IdealPoint{0.0}; }
    Complex disk() const;
    double real() const;  // half-plane coordinate; +/-inf at theta = 0
};

IdealPoint apply(const Mat2& m, IdealPoint p);

// Points of H^2 in the disk model.
struct Point {
    Complex w;
};

Point apply(const Mat2& m, Point p);
Point frame_point(const Mat2& frame);  // image of i
double distance(Point p, Point q);
double distance_to_geodesic(Point p, IdealPoint u, IdealPoint v);

// Oriented geodesic from tail to head.
struct Geodesic {
    IdealPoint tail, head;
};

// Translation axis of a hyperbolic element, oriented towards the attracting point.
// Throws ParabolicOrElliptic when |tr| <= 2 + eps.
Geodesic axis(const Mat2& m);
double translation_length(const Mat2& m);

double angle_distance(IdealPoint p, IdealPoint q);  // shortest arc, radians
double chord(IdealPoint p, IdealPoint q);

// Does q lie on the counterclockwise arc from lo to hi (closed, with slack eps)?
bool on_arc(IdealPoint lo, IdealPoint hi, IdealPoint q, double eps = 0);
double arc_length(IdealPoint lo, IdealPoint hi);  // counterclockwise

}  // namespace lamtrack
