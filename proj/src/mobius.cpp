#include "lamtrack/mobius.hpp"

#include <cmath>
#include <numbers>

#include "lamtrack/errors.hpp"
#include "lamtrack/tolerance.hpp"

namespace lamtrack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0) t += kTwoPi;
    if (t >= kTwoPi) t -= kTwoPi;
    return t;
}

// Disk action of a real matrix: C M C^{-1} with C = [[1,-i],[1,i]].
struct DiskMat {
    Complex p, q, r, s;
};

DiskMat to_disk(const Mat2& m) {
    const Complex I(0, 1);
    // C M
    Complex a = m.a - I * m.c, b = m.b - I * m.d;
    Complex c = m.a + I * m.c, d = m.b + I * m.d;
    // (C M) C^{-1}, C^{-1} = 1/(2i) [[i, i], [-1, 1]]
    Complex k = 1.0 / (2.0 * I);
    return {k * (a * I - b), k * (a * I + b), k * (c * I - d), k * (c * I + d)};
}

}  // namespace

double Mat2::stable_det() const {
    double dt = det();
    if (std::abs(dt) < 1e-9 * (std::abs(a * d) + std::abs(b * c))) return 1.0;
    return dt;
}

Mat2 Mat2::inverse() const {
    double dt = stable_det();
    return {d / dt, -b / dt, -c / dt, a / dt};
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

bool Mat2::near(const Mat2& o, double eps) const {
    auto close = [&](double s) {
        return std::abs(a - s * o.a) <= eps && std::abs(b - s * o.b) <= eps &&
               std::abs(c - s * o.c) <= eps && std::abs(d - s * o.d) <= eps;
    };
    return close(1.0) || close(-1.0);
}

Mat2 translation(double d) { return {std::exp(d / 2), 0, 0, std::exp(-d / 2)}; }

Mat2 rotation(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {c, s, -s, c};
}

Mat2 reflection_in(const Mat2& frame) { return frame * Mat2{-1, 0, 0, 1} * frame.inverse(); }

IdealPoint IdealPoint::from_angle(double t) { return {wrap(t)}; }

IdealPoint IdealPoint::from_homogeneous(double v1, double v2) {
    return from_angle(-2.0 * std::atan2(v2, v1));
}

IdealPoint IdealPoint::from_real(double x) {
    if (std::isinf(x)) return infinity();
    return from_homogeneous(x, 1.0);
}

Complex IdealPoint::disk() const { return std::polar(1.0, theta); }

double IdealPoint::real() const {
    double phi = -theta / 2;
    double s = std::sin(phi);
    if (s == 0) return INFINITY;
    return std::cos(phi) / s;
}

IdealPoint apply(const Mat2& m, IdealPoint p) {
    double phi = -p.theta / 2;
    double v1 = std::cos(phi), v2 = std::sin(phi);
    return IdealPoint::from_homogeneous(m.a * v1 + m.b * v2, m.c * v1 + m.d * v2);
}

Point apply(const Mat2& m, Point p) {
    DiskMat k = to_disk(m);
    Complex w = m.stable_det() < 0 ? std::conj(p.w) : p.w;
    return {(k.p * w + k.q) / (k.r * w + k.s)};
}

Point frame_point(const Mat2& frame) { return apply(frame, Point{Complex(0, 0)}); }

double distance(Point p, Point q) {
    double num = 2.0 * std::norm(p.w - q.w);
    double den = (1.0 - std::norm(p.w)) * (1.0 - std::norm(q.w));
    return std::acosh(1.0 + num / den);
}

double distance_to_geodesic(Point p, IdealPoint u, IdealPoint v) {
    auto move = [&](Complex z) { return (z - p.w) / (1.0 - std::conj(p.w) * z); };
    double ch = std::abs(move(u.disk()) - move(v.disk()));
    if (ch <= 0) return INFINITY;
    return std::acosh(std::max(1.0, 2.0 / ch));
}

Geodesic axis(const Mat2& m0) {
    Mat2 m = m0;
    double dt = m.stable_det();
    if (dt <= 0) throw ParabolicOrElliptic("orientation-reversing element");
    double s = 1.0 / std::sqrt(dt);
    m = {m.a * s, m.b * s, m.c * s, m.d * s};
    if (m.trace() < 0) m = {-m.a, -m.b, -m.c, -m.d};
    double tr = m.trace();
    if (tr <= 2.0 + tolerance()) throw ParabolicOrElliptic("|trace| <= 2");
    double disc = std::sqrt((tr - 2.0) * (tr + 2.0));
    double big = (tr + disc) / 2, small = 1.0 / big;
    auto eigvec = [&](double lam) {
        double x1 = m.b, y1 = lam - m.a;
        double x2 = lam - m.d, y2 = m.c;
        if (x1 * x1 + y1 * y1 >= x2 * x2 + y2 * y2) return IdealPoint::from_homogeneous(x1, y1);
        return IdealPoint::from_homogeneous(x2, y2);
    };
    return {eigvec(small), eigvec(big)};
}

double translation_length(const Mat2& m) {
    double tr = std::abs(m.trace()) / std::sqrt(std::abs(m.stable_det()));
    if (tr <= 2.0) return 0.0;
    return 2.0 * std::acosh(tr / 2.0);
}

double angle_distance(IdealPoint p, IdealPoint q) {
    double d = wrap(p.theta - q.theta);
    return std::min(d, kTwoPi - d);
}

double chord(IdealPoint p, IdealPoint q) { return 2.0 * std::sin(angle_distance(p, q) / 2.0); }

double arc_length(IdealPoint lo, IdealPoint hi) { return wrap(hi.theta - lo.theta); }

bool on_arc(IdealPoint lo, IdealPoint hi, IdealPoint q, double eps) {
    double span = arc_length(lo, hi);
    double off = wrap(q.theta - lo.theta);
    if (off <= span + eps) return true;
    return off >= kTwoPi - eps;
}

}  // namespace lamtrack
