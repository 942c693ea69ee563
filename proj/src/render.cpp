#include "lamtrack/render.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "lamtrack/errors.hpp"

namespace lamtrack {

const std::set<std::string>& RenderSpec::known_layers() {
    static const std::set<std::string> names{"cuff-lifts", "skeleton", "track", "boxes", "carried-geodesics"};
    return names;
}

void RenderSpec::validate() const {
    if (!(radius >= 0)) throw ParseError("radius: expected a nonnegative number");
    if (layers.empty()) throw ParseError("layers: at least one layer is required");
    for (const auto& l : layers)
        if (!known_layers().count(l)) throw ParseError("layers: unknown layer '" + l + "'");
}

namespace {

constexpr double kSize = 800;

struct Canvas {
    Model model;
    std::string body;

    // model plane: the unit disk, or the upper half-plane clipped to [-4, 4] x [0, 8]
    Complex plane(Point p) const {
        if (model == Model::Disk) return p.w;
        return Complex(0, 1) * (1.0 + p.w) / (1.0 - p.w);
    }
    Complex plane(IdealPoint q) const {
        if (model == Model::Disk) return q.disk();
        double x = q.real();
        return std::isinf(x) ? Complex(0, 1e6) : Complex(x, 0);
    }
    Complex mirror(Complex z) const { return model == Model::Disk ? 1.0 / std::conj(z) : std::conj(z); }
    Complex screen(Complex z) const {
        if (model == Model::Disk) return {kSize / 2 + 380 * z.real(), kSize / 2 - 380 * z.imag()};
        return {kSize / 2 + 100 * z.real(), kSize - 20 - 100 * z.imag()};
    }

    static std::string num(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", x);
        return buf;
    }
    static std::string xy(Complex z) { return num(z.real()) + " " + num(z.imag()); }

    // Arc from a to b on the circle through a, b, c, passing through c or avoiding it; a segment when collinear.
    void arc(Complex a, Complex b, Complex c, bool through, const std::string& style, bool large = false) {
        Complex sa = screen(a), sb = screen(b), sc = screen(c);
        double d = 2 * (sa.real() * (sb.imag() - sc.imag()) + sb.real() * (sc.imag() - sa.imag()) +
                        sc.real() * (sa.imag() - sb.imag()));
        std::string path = "M " + xy(sa);
        double scale = std::abs(sa - sb) + 1.0;
        bool line = std::abs(d) < 1e-9 * scale * scale || !std::isfinite(sc.real()) || !std::isfinite(sc.imag());
        double r = 0;
        if (!line) {
            auto sq = [](Complex z) { return std::norm(z); };
            Complex center((sq(sa) * (sb.imag() - sc.imag()) + sq(sb) * (sc.imag() - sa.imag()) +
                            sq(sc) * (sa.imag() - sb.imag())) / d,
                           (sq(sa) * (sc.real() - sb.real()) + sq(sb) * (sa.real() - sc.real()) +
                            sq(sc) * (sb.real() - sa.real())) / d);
            r = std::abs(sa - center);
            line = r > 1e5;
        }
        if (line) {
            path += " L " + xy(sb);
        } else {
            Complex u = sc - sa, v = sb - sc;
            bool positive = u.real() * v.imag() - u.imag() * v.real() > 0;
            bool sweep = through ? positive : !positive;
            path += " A " + num(r) + " " + num(r) + " 0 " + (large ? "1 " : "0 ") + (sweep ? "1" : "0") + " " + xy(sb);
        }
        body += "<path d=\"" + path + "\" " + style + "/>\n";
    }

    void segment(Point p, Point q, const std::string& style) {
        Complex a = plane(p), b = plane(q);
        arc(a, b, mirror(a), false, style);
    }

    void geodesic(IdealPoint u, IdealPoint v, const std::string& style) {
        Complex a = plane(u), b = plane(v);
        if (model == Model::Disk) {
            double den = 1.0 + (a * std::conj(b)).real();
            if (std::abs(den) < 1e-12) {
                arc(a, b, Complex(0, 0), true, style);
                return;
            }
            Complex c = (a + b) / den;
            double r = std::sqrt(std::max(0.0, std::norm(c) - 1.0));
            arc(a, b, c - r * c / std::abs(c), true, style);
            return;
        }
        if (std::isinf(u.real()) || std::isinf(v.real())) {
            double x = std::isinf(u.real()) ? b.real() : a.real();
            arc(Complex(x, 0), Complex(x, 8.2), Complex(x, 4), true, style);
            return;
        }
        double mid = (a.real() + b.real()) / 2, r = std::abs(a.real() - b.real()) / 2;
        arc(a, b, Complex(mid, r), true, style);
    }

    void boundary_arc(const IdealArc& arc_, const std::string& style) {
        if (model == Model::Disk) {
            double len = arc_.length();
            IdealPoint mid = IdealPoint::from_angle(arc_.lo.theta + len / 2);
            arc(arc_.lo.disk(), arc_.hi.disk(), mid.disk(), true, style, len > std::numbers::pi);
            return;
        }
        double a = arc_.lo.real(), b = arc_.hi.real();
        auto clip = [](double x) { return std::clamp(x, -4.2, 4.2); };
        if (std::isinf(a) || std::isinf(b) || a > b) {
            if (!std::isinf(a)) arc(Complex(clip(a), 0), Complex(4.2, 0), Complex(clip(a) - 1, 0), true, style);
            if (!std::isinf(b)) arc(Complex(-4.2, 0), Complex(clip(b), 0), Complex(-5.2, 0), true, style);
            return;
        }
        arc(Complex(clip(a), 0), Complex(clip(b), 0), Complex(clip(a) - 1, 0), true, style);
    }
};

const char* kCuff = "fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\"";
const char* kSkeleton = "fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"";
const char* kTrack = "fill=\"none\" stroke=\"#202020\" stroke-width=\"0.8\"";
const char* kCarried = "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.2\"";
const char* kBoxI = "fill=\"none\" stroke=\"#27ae60\" stroke-width=\"5\"";
const char* kBoxJ = "fill=\"none\" stroke=\"#8e44ad\" stroke-width=\"5\"";
const char* kBoxEdge = "fill=\"none\" stroke=\"#27ae60\" stroke-width=\"0.8\" stroke-dasharray=\"2 2\"";

std::vector<Geodesic> unique_geodesics(std::vector<Geodesic> v) {
    std::vector<Geodesic> out;
    for (const auto& g : v) {
        bool dup = false;
        for (const auto& h : out)
            dup = dup || (angle_distance(g.tail, h.tail) < 1e-9 && angle_distance(g.head, h.head) < 1e-9) ||
                  (angle_distance(g.tail, h.head) < 1e-9 && angle_distance(g.head, h.tail) < 1e-9);
        if (!dup) out.push_back(g);
    }
    return out;
}

}  // namespace

std::string render_svg(const TrackGeometry& g, const Multicurve& mc, const std::vector<GeodesicBox>& boxes,
                       const RenderSpec& spec) {
    spec.validate();
    const TrainTrack& tt = *g.tt;
    Canvas cv{spec.model, ""};
    Point base = frame_point(Mat2{});
    auto near = lifted_vertices_near(g, [&](Point p) { return distance(p, base); }, spec.radius);
    auto has = [&](const char* layer) { return spec.layers.count(layer) > 0; };

    if (has("cuff-lifts")) {
        std::vector<Geodesic> lifts;
        for (const auto& lv : near)
            if (tt.vertices[lv.vertex].on_cuff) lifts.push_back(cuff_lift(g, lv));
        for (const auto& l : unique_geodesics(lifts)) cv.geodesic(l.tail, l.head, kCuff);
    }
    if (has("skeleton")) {
        for (const auto& s : skeleton_segments(g))
            cv.segment(frame_point(s.start), frame_point(s.start * translation(s.length)), kSkeleton);
    }
    if (has("track")) {
        for (const auto& lv : near)
            for (int h : tt.vertices[lv.vertex].cyclic)
                if ((h & 1) == 0) cv.segment(lv.point(g), lv.along(g, h).point(g), kTrack);
    }
    if (has("carried-geodesics") && !mc.empty()) {
        Multicurve res = resolve(tt, mc);
        for (const auto& comp : res.components)
            for (const auto& l : lifts_through(g, comp.path, near)) cv.geodesic(l.tail, l.head, kCarried);
    }
    if (has("boxes")) {
        for (const auto& b : boxes) {
            cv.boundary_arc(b.I, kBoxI);
            cv.boundary_arc(b.J, kBoxJ);
            cv.geodesic(b.I.hi, b.J.lo, kBoxEdge);
            cv.geodesic(b.J.hi, b.I.lo, kBoxEdge);
        }
    }

    std::string size = Canvas::num(kSize);
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + size + "\" height=\"" + size +
                      "\" viewBox=\"0 0 " + size + " " + size + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (spec.model == Model::Disk)
        out += "<circle cx=\"400.000\" cy=\"400.000\" r=\"380.000\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    else
        out += "<path d=\"M 0.000 780.000 L 800.000 780.000\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    out += cv.body;
    out += "</svg>\n";
    return out;
}

}  // namespace lamtrack
