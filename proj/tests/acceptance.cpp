#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "lamtrack/cover.hpp"
#include "lamtrack/errors.hpp"
#include "lamtrack/hyp_trig.hpp"
#include "lamtrack/measures.hpp"
#include "support.hpp"

using namespace lamtrack;
using namespace lamtrack::testing;

namespace {

const double kLen = 2 * std::acosh(2.0);

struct Verdict {
    bool pass;
    std::string detail;
};

double rel(double lhs, double rhs) { return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)); }

double max_entry(const Mat2& m) { return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)}); }

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Verdict trig_identities() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.05, 20);
    double worst = 0;
    int pentagons = 0;
    for (int k = 0; k < 10000; ++k) {
        double a = u(rng), b = u(rng), c = u(rng);
        double x = hexagon_orthogeodesic(a, b, c);
        worst = std::max(worst, rel(std::cosh(x) * std::sinh(a) * std::sinh(b), std::cosh(c) + std::cosh(a) * std::cosh(b)));
        double h = right_triangle_hypotenuse(a, b);
        worst = std::max(worst, rel(std::cosh(h), std::cosh(a) * std::cosh(b)));
        double s = lambert_ideal_side(a);
        worst = std::max(worst, rel(std::sinh(a) * std::sinh(s), 1.0));
        if (std::tanh(a) * std::cosh(b) > 1) {
            double p = pentagon_solve(a, b);
            worst = std::max(worst, rel(std::tanh(a) * std::cosh(b) * std::tanh(p), 1.0));
            ++pentagons;
        }
    }
    return {worst < 1e-12 && pentagons > 1000, "max relative residual " + fmt("%.2e", worst)};
}

Verdict holonomy_conformance() {
    double trace_err = 0, rel_err = 0;
    for (auto kind : {ExampleKind::Flute, ExampleKind::Ladder, ExampleKind::Tree})
        for (int depth = 1; depth <= 4; ++depth)
            for (double len : {0.7, kLen, 3.0})
                for (double twist : {0.0, 0.3, 1.0}) {
                    auto pd = build_example(kind, depth, len, twist);
                    auto h = holonomy(pd);
                    for (const auto& m : h.cuff) trace_err = std::max(trace_err, std::abs(std::abs(m.trace()) - 2 * std::cosh(len / 2)));
                    for (const auto& b : h.boundary) {
                        Mat2 prod = b[2] * b[1] * b[0];
                        double s = prod.trace() < 0 ? -1 : 1;
                        double e = std::max({std::abs(prod.a - s), std::abs(prod.b), std::abs(prod.c), std::abs(prod.d - s)});
                        rel_err = std::max(rel_err, e / (max_entry(b[0]) * max_entry(b[1]) * max_entry(b[2])));
                    }
                }
    return {trace_err < 1e-9 && rel_err < 1e-9,
            "trace error " + fmt("%.2e", trace_err) + ", relative pants relation error " + fmt("%.2e", rel_err)};
}

Verdict region_census() {
    struct Case {
        std::array<Slot, 3> slots;
        int type;
        std::array<int, 3> expect;  // triangles, punctured monogons, boundary
    };
    Slot c = Slot::cuff(kLen), p = Slot::make_cusp();
    std::vector<Case> cases{{{c, c, c}, -1, {2, 0, 3}}, {{c, c, c}, 0, {2, 0, 3}}, {{c, c, c}, 1, {2, 0, 3}},
                            {{c, c, c}, 2, {2, 0, 3}},  {{c, c, p}, 0, {1, 1, 2}},  {{c, c, p}, 1, {1, 1, 2}}};
    int bad = 0;
    for (const auto& k : cases) {
        PantsDecomposition pd;
        pd.pants.push_back({0, k.slots});
        auto tt = build_track(pd, StandardChoice::make(pd, {TrackType{k.type}}, {}));
        std::array<int, 3> got{};
        for (const auto& r : regions(tt)) ++got[static_cast<int>(r.kind)];
        if (got != k.expect) ++bad;
    }
    return {bad == 0, std::to_string(cases.size() - bad) + "/" + std::to_string(cases.size()) + " types match"};
}

Verdict edge_path_laws() {
    auto pd = build_example(ExampleKind::Tree, 2, kLen, 0.25);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    TrackGeometry g(tt);
    int back = backtracking_violations(g, 12), dup = duplicate_connector_paths(g);
    return {back == 0 && dup == 0,
            "backtracking " + std::to_string(back) + ", duplicate connector paths " + std::to_string(dup)};
}

struct Harvest {
    int systems = 0, round_trips = 0, balanced = 0;
};

Harvest& harvest() {
    static Harvest h;
    return h;
}

Verdict round_trip() {
    std::mt19937_64 rng(5);
    std::vector<PantsDecomposition> surfaces{build_example(ExampleKind::Ladder, 3, kLen, 0.25),
                                             build_example(ExampleKind::Tree, 3, kLen, -0.4),
                                             build_example(ExampleKind::Flute, 4, kLen, 0.1)};
    Harvest& h = harvest();
    while (h.systems < 100) {
        const auto& pd = surfaces[h.systems % surfaces.size()];
        auto c = random_carried(pd, rng);
        if (c.components.components.size() > 5) continue;
        Multicurve mc = c.components;
        for (auto& comp : mc.components)
            comp.weight = Rational(static_cast<long long>(1 + rng() % 40), static_cast<long long>(1 + rng() % 16));
        auto w = weights_from_multicurve(*c.tt, mc);
        ++h.systems;
        if (validate_switch(*c.tt, w)) ++h.balanced;
        if (weights_from_multicurve(*c.tt, realize_weights(*c.tt, w)) == w) ++h.round_trips;
    }
    return {h.round_trips == h.systems, std::to_string(h.round_trips) + "/" + std::to_string(h.systems) + " exact"};
}

Verdict switch_relations() {
    const Harvest& h = harvest();
    return {h.systems == 100 && h.balanced == h.systems,
            std::to_string(h.balanced) + "/" + std::to_string(h.systems) + " balanced"};
}

bool arc_inside(const IdealArc& inner, const IdealArc& outer) {
    return outer.contains(inner.lo) && outer.contains(inner.hi) && inner.length() < outer.length();
}

Verdict carrier_boxes_check() {
    auto pd = build_example(ExampleKind::Ladder, 3, kLen, 0.25);
    if (!validate_bounded(pd, 3)) return {false, "surface not 3-bounded"};
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    TrackGeometry g(tt);
    std::mt19937_64 rng(7);
    int spans = 0, failed = 0, misclassified = 0;
    for (const auto& s : connector_spans(tt, 8)) {
        ++spans;
        CarrierBoxes cb;
        try {
            cb = carrier_boxes(g, s);
        } catch (const Error&) {
            ++failed;
            continue;
        }
        bool good = arc_inside(cb.inner.I, cb.outer.I) && arc_inside(cb.inner.J, cb.outer.J);
        for (double m : cb.margins) good = good && m > 0;
        SpanCheck r = monte_carlo_span_check(g, s, cb, 50, rng);
        misclassified += (r.through - r.through_inside) + (r.avoiding - r.avoiding_outside);
        if (!good) ++failed;
    }
    return {spans > 0 && failed == 0 && misclassified == 0,
            std::to_string(spans) + " spans, " + std::to_string(failed) + " failed, " + std::to_string(misclassified) +
                " misclassified"};
}

double gauss_box_integral(double a, double b, double c, double d) {
    const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
    const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                          0.2369268850561891};
    const int n = 40;
    double hx = (b - a) / n, hy = (d - c) / n, sum = 0;
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < 5; ++p) {
            double x = a + hx * (i + 0.5 + 0.5 * xs[p]);
            for (int j = 0; j < n; ++j)
                for (int q = 0; q < 5; ++q) {
                    double y = c + hy * (j + 0.5 + 0.5 * xs[q]);
                    sum += ws[p] * ws[q] / ((x - y) * (x - y));
                }
        }
    return sum * hx * hy / 4;
}

Verdict liouville_oracle() {
    auto arc = [](double lo, double hi) { return IdealArc{IdealPoint::from_real(lo), IdealPoint::from_real(hi)}; };
    GeodesicBox box{arc(0, 1), arc(2, 3)};
    double exact = std::log(4.0 / 3.0);
    double err = std::abs(liouville(box) - gauss_box_integral(0, 1, 2, 3));
    err = std::max(err, std::abs(exact - gauss_box_integral(0, 1, 2, 3)));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2, 2);
    double moved_err = 0;
    for (int k = 0; k < 20; ++k) {
        Mat2 m{u(rng), u(rng), u(rng), u(rng)};
        if (m.det() < 0) std::swap(m.a, m.b), std::swap(m.c, m.d);
        double s = 1.0 / std::sqrt(m.det());
        m = {m.a * s, m.b * s, m.c * s, m.d * s};
        GeodesicBox moved{{apply(m, box.I.lo), apply(m, box.I.hi)}, {apply(m, box.J.lo), apply(m, box.J.hi)}};
        moved_err = std::max(moved_err, std::abs(liouville(moved) - exact));
    }
    return {err < 1e-9 && moved_err < 1e-9,
            "integral error " + fmt("%.2e", err) + ", chart error " + fmt("%.2e", moved_err)};
}

Verdict norm_equivalence() {
    auto pd = build_example(ExampleKind::Ladder, 2, kLen, 0.25);
    std::mt19937_64 rng(9);
    int threads = std::max(1u, std::thread::hardware_concurrency());
    double lo = INFINITY, hi = 0, homog = 0;
    bool bounds = true;
    for (int k = 0; k < 50; ++k) {
        auto c = random_carried(pd, rng);
        Multicurve mc = c.components;
        for (auto& comp : mc.components)
            comp.weight = Rational(static_cast<long long>(1 + rng() % 40), static_cast<long long>(1 + rng() % 16));
        auto r = thurston_norm_estimate(*c.g, mc, 300, threads);
        auto r3 = thurston_norm_estimate(*c.g, scaled(mc, Rational(3)), 300, threads);
        homog = std::max({homog, std::abs(r3.sup_norm - 3 * r.sup_norm), std::abs(r3.thurston_estimate - 3 * r.thurston_estimate)});
        if (!(r.thurston_estimate > 0)) {
            bounds = false;
            continue;
        }
        double ratio = r.sup_norm / r.thurston_estimate, ratio3 = r3.sup_norm / r3.thurston_estimate;
        lo = std::min({lo, ratio, ratio3});
        hi = std::max({hi, ratio, ratio3});
        bounds = bounds && r.sup_norm <= r.C * r.thurston_estimate + 1e-9 &&
                 r.thurston_estimate <= r.k_prime * r.sup_norm + 1e-9;
    }
    return {homog < 1e-9 && bounds && std::isfinite(hi) && lo > 0,
            "homogeneity error " + fmt("%.1e", homog) + ", C* = " + fmt("%.4f", hi) + ", k* = " + fmt("%.4f", 1 / lo)};
}

Verdict convergence_regression() {
    auto pd = build_example(ExampleKind::Ladder, 2, kLen, 0.25);
    std::mt19937_64 rng(10);
    auto c = random_carried(pd, rng);
    std::vector<GeodesicBox> boxes;
    for (const auto& s : connector_spans(*c.tt, 4)) {
        if (boxes.size() == 10) break;
        boxes.push_back(carrier_boxes(*c.g, s).outer);
    }
    if (boxes.size() < 10) return {false, "fewer than 10 boxes"};
    std::vector<double> base;
    double top = 0;
    for (const auto& b : boxes) {
        base.push_back(box_mass(*c.g, c.components, b));
        top = std::max(top, base.back());
    }
    if (top <= 0) return {false, "box family carries no mass"};
    auto w0 = weights_from_multicurve(*c.tt, c.components);
    double prev = INFINITY, prev_edge = INFINITY;
    bool monotone = true, bounded = true;
    double last = 0;
    for (int n = 1; n <= 24; ++n) {
        Multicurve mn = scaled(c.components, Rational(n + 1, n));
        auto wn = weights_from_multicurve(*c.tt, mn);
        double edge = 0;
        for (size_t e = 0; e < wn.size(); ++e) edge = std::max(edge, std::abs(wn.value(e) - w0.value(e)));
        double diff = 0;
        for (size_t i = 0; i < boxes.size(); ++i) diff = std::max(diff, std::abs(box_mass(*c.g, mn, boxes[i]) - base[i]));
        if (n > 8 && (diff > prev + 1e-12 || edge > prev_edge)) monotone = false;
        if (diff > top / n + 1e-9) bounded = false;
        prev = diff;
        prev_edge = edge;
        last = diff;
    }
    return {monotone && bounded, "difference at n = 24: " + fmt("%.3e", last)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Verdict()> run;
        double seconds;  // 0: no budget
    };
    std::vector<Criterion> all{{"trig identities", trig_identities, 1},
                               {"holonomy conformance", holonomy_conformance, 0},
                               {"region census", region_census, 1},
                               {"edge-path laws", edge_path_laws, 30},
                               {"round-trip exactness", round_trip, 10},
                               {"switch relations", switch_relations, 0},
                               {"carrier boxes", carrier_boxes_check, 60},
                               {"Liouville oracle", liouville_oracle, 0},
                               {"norm homogeneity and equivalence", norm_equivalence, 0},
                               {"convergence regression", convergence_regression, 10}};
    int failures = 0;
    for (size_t i = 0; i < all.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = all[i].run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = all[i].seconds == 0 || secs < all[i].seconds;
        bool pass = v.pass && in_time;
        if (!pass) ++failures;
        std::printf("%s %2zu %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", i + 1, all[i].name, v.detail.c_str(), secs,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
