#include "lamtrack/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <thread>
#include <tuple>

#include "lamtrack/errors.hpp"
#include "lamtrack/tolerance.hpp"

namespace lamtrack {

EdgeWeightSystem EdgeWeightSystem::zeros(const TrainTrack& tt, bool exact) {
    EdgeWeightSystem w;
    w.exact = exact;
    if (exact)
        w.q.assign(tt.edges.size(), Rational(0));
    else
        w.x.assign(tt.edges.size(), 0.0);
    return w;
}

double EdgeWeightSystem::value(int edge) const { return exact ? to_double(q[edge]) : x[edge]; }

bool EdgeWeightSystem::operator==(const EdgeWeightSystem& o) const {
    if (exact != o.exact) return false;
    return exact ? q == o.q : x == o.x;
}

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

Rational to_rational(double v, long long max_den, double tol) {
    if (!std::isfinite(v)) throw IrrationalWeight("non-finite weight");
    // continued fraction convergents, with the best semiconvergent at the end
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = v;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(r);
        if (std::abs(a) > 9e15) break;
        long long ai = static_cast<long long>(a);
        long long q2 = ai * q1 + q0;
        if (q2 > max_den) {
            long long k = (max_den - q0) / q1;
            long long ps = k * p1 + p0, qs = k * q1 + q0;
            if (qs > 0 && std::abs(v - static_cast<double>(ps) / qs) < std::abs(v - static_cast<double>(p1) / q1)) {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        long long p2 = ai * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = r - a;
        if (std::abs(v - static_cast<double>(p1) / q1) <= 1e-15 * std::max(1.0, std::abs(v)) || frac == 0) break;
        r = 1.0 / frac;
    }
    Rational out(p1, q1);
    if (std::abs(to_double(out) - v) > tol * std::max(1.0, std::abs(v)))
        throw IrrationalWeight("no fraction with denominator <= " + std::to_string(max_den) + " near " + std::to_string(v));
    return out;
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational rational_from_string(const std::string& s) {
    try {
        size_t slash = s.find('/');
        size_t used = 0;
        if (slash == std::string::npos) {
            long long n = std::stoll(s, &used);
            if (used != s.size()) throw ParseError("bad rational '" + s + "'");
            return Rational(n);
        }
        std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        long long n = std::stoll(a, &used);
        if (used != a.size()) throw ParseError("bad rational '" + s + "'");
        long long d = std::stoll(b, &used);
        if (used != b.size() || d == 0) throw ParseError("bad rational '" + s + "'");
        return Rational(n, d);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("bad rational '" + s + "'");
    }
}

namespace {

std::vector<std::array<long long, 3>> slot_intersections(const PantsDecomposition& pd, const DehnThurston& dt) {
    std::vector<std::array<long long, 3>> m(pd.pants.size(), {0, 0, 0});
    for (size_t g = 0; g < pd.gluings.size(); ++g) {
        m[pd.gluings[g].a.pants][pd.gluings[g].a.slot] = dt.m[g];
        m[pd.gluings[g].b.pants][pd.gluings[g].b.slot] = dt.m[g];
    }
    return m;
}

void check_closed(const TrainTrack& tt, const EdgePath& p) {
    if (p.dedges.empty() || !p.closed()) throw NotCarried("component is not a closed edge path");
    if (!is_edge_path(tt, p)) throw NotCarried("component is not a smooth edge path");
}

}  // namespace

EdgeWeightSystem dt_weights(const TrainTrack& tt, const DehnThurston& dt) {
    const PantsDecomposition& pd = tt.pd;
    StandardChoice want = carrying_choice(pd, dt);
    auto m = slot_intersections(pd, dt);
    for (size_t p = 0; p < pd.pants.size(); ++p) {
        if (m[p][0] + m[p][1] + m[p][2] == 0) continue;
        if (!(want.types[p] == tt.choice.types[p])) throw NotCarried("track type does not carry these coordinates");
        for (int s = 0; s < 3; ++s) {
            if (pd.pants[p].slots[s].cusp || m[p][s] == 0) continue;
            if (want.tangency[p][s] != tt.choice.tangency[p][s])
                throw NotCarried("tangency does not carry these coordinates");
        }
    }
    EdgeWeightSystem w = EdgeWeightSystem::zeros(tt);
    for (size_t e = 0; e < tt.edges.size(); ++e) {
        const TrackEdge& te = tt.edges[e];
        long long v = 0;
        if (te.cuff_edge) {
            int g = tt.cuffs[te.cuff].gluing;
            v = g >= 0 ? std::llabs(dt.t[g]) : 0;
        } else {
            const auto& mp = m[te.pants];
            int i = tt.choice.types[te.pants].self_slot;
            auto at = [&](int k) { return mp[((k % 3) + 3) % 3]; };
            long long self = i >= 0 ? at(i) - at(i + 1) - at(i + 2) : 0;
            switch (te.role) {
                case EdgeRole::Stem: v = at(te.slot); break;
                case EdgeRole::Branch: v = at(te.slot) + at(te.slot + 1) - at(te.slot + 2); break;
                case EdgeRole::LoopOut:
                case EdgeRole::Loop: v = self; break;
                case EdgeRole::LoopBack: v = self + 2 * at(te.slot); break;
                case EdgeRole::Arc: v = at(te.slot); break;
                case EdgeRole::Cuff: break;
            }
            if (te.role == EdgeRole::Branch || te.role == EdgeRole::LoopOut || te.role == EdgeRole::Loop ||
                te.role == EdgeRole::LoopBack) {
                if (v < 0 || v % 2 != 0) throw NotCarried("coordinates violate the pants constraints");
                v /= 2;
            }
        }
        if (v < 0) throw NotCarried("negative edge weight");
        w.q[e] = Rational(v);
    }
    return w;
}

EdgeWeightSystem weights_from_multicurve(const TrainTrack& tt, const Multicurve& mc) {
    EdgeWeightSystem w = EdgeWeightSystem::zeros(tt);
    for (const auto& c : mc.components) {
        check_closed(tt, c.path);
        if (c.weight < Rational(0)) throw NotCarried("negative component weight");
        for (int d : c.path.dedges) w.q[edge_of(d)] += c.weight;
    }
    if (mc.dehn_thurston) {
        if (mc.dt_weight < Rational(0)) throw NotCarried("negative weight");
        EdgeWeightSystem dtw = dt_weights(tt, *mc.dehn_thurston);
        for (size_t e = 0; e < w.q.size(); ++e) w.q[e] += dtw.q[e] * mc.dt_weight;
    }
    return w;
}

bool validate_switch(const TrainTrack& tt, const EdgeWeightSystem& w) {
    if (w.size() != tt.edges.size()) return false;
    for (const auto& v : tt.vertices) {
        if (w.exact) {
            Rational s[2] = {0, 0};
            for (size_t k = 0; k < v.cyclic.size(); ++k) s[v.side[k]] += w.q[edge_of(v.cyclic[k])];
            if (s[0] != s[1]) return false;
        } else {
            double s[2] = {0, 0};
            for (size_t k = 0; k < v.cyclic.size(); ++k) s[v.side[k]] += w.x[edge_of(v.cyclic[k])];
            if (std::abs(s[0] - s[1]) > tolerance() * std::max(1.0, std::abs(s[0]))) return false;
        }
    }
    return true;
}

namespace {

// Strands of the fattened track. Every directed edge d carries a band [0, w] measured from its left;
// crossing the switch at its head is a translation onto the band of the next directed edge.
struct Bands {
    const TrainTrack& tt;
    std::vector<Rational> w;    // per edge
    std::vector<Rational> off;  // per half-edge, from the start of its smooth side in counterclockwise order
    std::vector<Rational> total;

    Bands(const TrainTrack& t, std::vector<Rational> weights) : tt(t), w(std::move(weights)) {
        off.assign(2 * tt.edges.size(), Rational(0));
        total.assign(tt.vertices.size(), Rational(0));
        for (size_t v = 0; v < tt.vertices.size(); ++v) {
            const auto& tv = tt.vertices[v];
            int n = static_cast<int>(tv.cyclic.size());
            for (int s = 0; s < 2; ++s) {
                int start = 0;
                for (int k = 0; k < n; ++k)
                    if (tv.side[k] == s && tv.side[(k + n - 1) % n] != s) start = k;
                Rational acc = 0;
                for (int t = 0; t < n; ++t) {
                    int k = (start + t) % n;
                    if (tv.side[k] != s) continue;
                    off[tv.cyclic[k]] = acc;
                    acc += w[edge_of(tv.cyclic[k])];
                }
                total[v] = acc;
            }
        }
    }

    Rational width(int d) const { return w[edge_of(d)]; }

    // Image of the band piece [a, b) of directed edge d after crossing its head switch.
    std::pair<int, Rational> step(int d, const Rational& a, const Rational& b) const {
        int h = d ^ 1;
        int v = tt.half_vertex(h);
        const auto& tv = tt.vertices[v];
        int s = tt.side_of(h);
        Rational mid = total[v] - (off[h] + (a + b) / 2);
        for (size_t k = 0; k < tv.cyclic.size(); ++k) {
            int out = tv.cyclic[k];
            if (tv.side[k] == s || width(out) == Rational(0)) continue;
            if (off[out] < mid && mid < off[out] + width(out))
                return {out, off[out] + width(out) - total[v] + off[h] + a};
        }
        throw SwitchViolation("strand has nowhere to go");
    }

    // Cut points where the other side's bands begin or end, seen from an arriving band.
    std::set<Rational> cuts(int d) const {
        std::set<Rational> out{Rational(0), width(d)};
        int h = d ^ 1;
        int v = tt.half_vertex(h);
        const auto& tv = tt.vertices[v];
        int s = tt.side_of(h);
        for (size_t k = 0; k < tv.cyclic.size(); ++k) {
            if (tv.side[k] == s) continue;
            for (Rational c : {off[tv.cyclic[k]], off[tv.cyclic[k]] + width(tv.cyclic[k])}) {
                Rational x = total[v] - c - off[h];
                if (x > Rational(0) && x < width(d)) out.insert(x);
            }
        }
        return out;
    }
};

std::vector<int> primitive_root(const std::vector<int>& seq) {
    size_t n = seq.size();
    for (size_t p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool ok = true;
        for (size_t i = p; i < n && ok; ++i) ok = seq[i] == seq[i - p];
        if (ok) return {seq.begin(), seq.begin() + static_cast<long>(p)};
    }
    return seq;
}

}  // namespace

Multicurve realize_weights(const TrainTrack& tt, const EdgeWeightSystem& ws) {
    if (ws.size() != tt.edges.size()) throw SwitchViolation("one weight per edge expected");
    std::vector<Rational> w;
    for (size_t e = 0; e < tt.edges.size(); ++e) w.push_back(ws.exact ? ws.q[e] : to_rational(ws.x[e], 100000, 1e-13));
    for (const auto& x : w)
        if (x < Rational(0)) throw SwitchViolation("negative weight");
    EdgeWeightSystem exact;
    exact.q = w;
    if (!validate_switch(tt, exact)) throw SwitchViolation("switch relation fails");

    Bands bands(tt, w);
    int H = static_cast<int>(2 * tt.edges.size());
    std::vector<std::set<Rational>> cut(H);
    for (int d = 0; d < H; ++d)
        if (bands.width(d) > Rational(0)) cut[d] = bands.cuts(d);

    for (bool changed = true; changed;) {
        changed = false;
        for (int d = 0; d < H; ++d) {
            if (cut[d].size() < 2) continue;
            for (auto it = cut[d].begin(); std::next(it) != cut[d].end(); ++it) {
                Rational a = *it, b = *std::next(it);
                auto [to, a2] = bands.step(d, a, b);
                Rational b2 = a2 + (b - a);
                changed |= cut[to].insert(a2).second;
                changed |= cut[to].insert(b2).second;
                auto lo = cut[to].upper_bound(a2);
                if (lo != cut[to].end() && *lo < b2) {
                    cut[d].insert(a + (*lo - a2));
                    changed = true;
                    break;
                }
            }
        }
    }

    std::map<std::vector<int>, Rational> found;
    std::set<std::pair<int, Rational>> seen;
    for (int d = 0; d < H; ++d) {
        if (cut[d].size() < 2) continue;
        for (auto it = cut[d].begin(); std::next(it) != cut[d].end(); ++it) {
            if (seen.count({d, *it})) continue;
            Rational width = *std::next(it) - *it;
            std::vector<int> seq;
            int cd = d;
            Rational ca = *it;
            do {
                seen.insert({cd, ca});
                seq.push_back(cd);
                auto [to, a2] = bands.step(cd, ca, ca + width);
                cd = to;
                ca = a2;
            } while (!(cd == d && ca == *it));
            std::vector<int> root = primitive_root(seq);
            Rational times(static_cast<long long>(seq.size() / root.size()));
            EdgePath canon = canonical_cycle(EdgePath{root, static_cast<int>(root.size())});
            found[canon.dedges] += width * times;
        }
    }
    Multicurve mc;
    for (auto& [path, weight] : found)
        mc.components.push_back({EdgePath{path, static_cast<int>(path.size())}, weight / 2});
    return mc;
}

Multicurve resolve(const TrainTrack& tt, const Multicurve& mc) {
    Multicurve out;
    out.components = mc.components;
    if (mc.dehn_thurston) {
        EdgeWeightSystem w = dt_weights(tt, *mc.dehn_thurston);
        for (auto& x : w.q) x *= mc.dt_weight;
        Multicurve r = realize_weights(tt, w);
        out.components.insert(out.components.end(), r.components.begin(), r.components.end());
    }
    return out;
}

double sup_norm(const EdgeWeightSystem& w) {
    double best = 0;
    for (size_t e = 0; e < w.size(); ++e) best = std::max(best, w.value(static_cast<int>(e)));
    return best;
}

double fellow_travel_distance(const TrackGeometry& g, const EdgePath& p) {
    Geodesic ax = axis(g.product(p.dedges));
    Mat2 m;
    double best = 0;
    for (int d : p.dedges) {
        Point pt = apply(m, g.position[g.tt->tail_of(d)]);
        best = std::max(best, distance_to_geodesic(pt, ax.tail, ax.head));
        m = m * g.step(d);
    }
    return best;
}

namespace {

bool same_geodesic(const Geodesic& a, const Geodesic& b, double eps) {
    return (angle_distance(a.tail, b.tail) <= eps && angle_distance(a.head, b.head) <= eps) ||
           (angle_distance(a.tail, b.head) <= eps && angle_distance(a.head, b.tail) <= eps);
}

std::vector<Geodesic> dedupe(std::vector<Geodesic> v, double eps = 1e-9) {
    for (auto& x : v)
        if (x.head.theta < x.tail.theta) std::swap(x.head, x.tail);
    std::sort(v.begin(), v.end(), [](const Geodesic& a, const Geodesic& b) { return a.tail.theta < b.tail.theta; });
    std::vector<Geodesic> out;
    for (const auto& x : v) {
        bool dup = false;
        for (auto it = out.rbegin(); it != out.rend() && x.tail.theta - it->tail.theta <= eps; ++it)
            if (same_geodesic(*it, x, eps)) dup = true;
        if (!dup) out.push_back(x);
    }
    return out;
}

}  // namespace

std::vector<Geodesic> lifts_through(const TrackGeometry& g, const EdgePath& p, const std::vector<LiftedVertex>& at) {
    size_t n = p.dedges.size();
    std::vector<Geodesic> axes;
    std::vector<int> starts;
    for (size_t i = 0; i < n; ++i) {
        std::vector<int> rot(p.dedges.begin() + static_cast<long>(i), p.dedges.end());
        rot.insert(rot.end(), p.dedges.begin(), p.dedges.begin() + static_cast<long>(i));
        axes.push_back(axis(g.product(rot)));
        starts.push_back(g.tt->tail_of(p.dedges[i]));
    }
    std::vector<Geodesic> out;
    for (const auto& lv : at)
        for (size_t i = 0; i < n; ++i)
            if (starts[i] == lv.vertex) out.push_back({apply(lv.placement, axes[i].tail), apply(lv.placement, axes[i].head)});
    return dedupe(std::move(out));
}

double covering_bound(double d) { return (std::cosh(d + 0.5) - 1.0) / (std::cosh(0.5) - 1.0); }

std::vector<SkeletonSegment> skeleton_segments(const TrackGeometry& g) {
    std::vector<SkeletonSegment> segs;
    for (size_t p = 0; p < g.models.size(); ++p) {
        const PantsModel& m = g.models[p];
        Mat2 base = g.placement[p];
        for (int i = 0; i < 3; ++i) {
            if (m.cusp[i]) continue;
            segs.push_back({base * m.midpoint_frame[i], 2 * m.half[i], true});
            Mat2 corner = base * m.midpoint_frame[i] * translation(m.half[i] / 2) * rotation(std::numbers::pi / 2);
            double len = m.seam_length[i];
            segs.push_back({corner, std::isfinite(len) ? len : 2.0, false});
        }
    }
    return segs;
}

std::vector<Point> skeleton_centers(const TrackGeometry& g, int count) {
    std::vector<SkeletonSegment> segs = skeleton_segments(g);
    double total = 0;
    for (const auto& s : segs) total += s.length;
    std::vector<Point> out;
    for (const auto& s : segs) {
        int n = std::max(1, static_cast<int>(std::lround(count * s.length / total)));
        for (int k = 0; k < n; ++k) out.push_back(frame_point(s.start * translation((k + 0.5) * s.length / n)));
    }
    return out;
}

namespace {

double cosh_distance(Point p, Point q) {
    return 1.0 + 2.0 * std::norm(p.w - q.w) / ((1.0 - std::norm(p.w)) * (1.0 - std::norm(q.w)));
}

template <typename F>
void parallel_for(size_t n, int threads, F&& f) {
    int nt = std::max(1, threads);
    if (nt == 1) {
        for (size_t k = 0; k < n; ++k) f(k);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (size_t k = t; k < n; k += nt) f(k);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

namespace {

// Parameters s in [0, len] where frame * translation(s) * i lies within distance 1 of l.
std::optional<std::pair<double, double>> unit_band(const Mat2& frame, double len, const Geodesic& l) {
    Mat2 back = frame.inverse();
    double u = apply(back, l.tail).real(), v = apply(back, l.head).real();
    double lo = 0, hi = 0;
    if (!std::isfinite(u) || !std::isfinite(v)) {
        double x = std::isfinite(u) ? u : v;
        // sinh d = |x| e^{-s}
        lo = std::log(std::abs(x) / std::sinh(1.0));
        hi = INFINITY;
    } else {
        // sinh d = |uv + e^{2s}| / (|v - u| e^s)
        double k = std::abs(v - u) * std::sinh(1.0), uv = u * v;
        double disc = k * k - 4 * uv;
        if (disc < 0) return std::nullopt;
        double x1 = (k - std::sqrt(disc)) / 2, x2 = (k + std::sqrt(disc)) / 2;
        double x3 = uv < 0 ? (-k + std::sqrt(k * k - 4 * uv)) / 2 : 0;
        double a = std::max(x1, x3);
        if (x2 <= 0 || a > x2) return std::nullopt;
        lo = a > 0 ? std::log(a) : -INFINITY;
        hi = std::log(x2);
    }
    lo = std::max(lo, 0.0);
    hi = std::min(hi, len);
    if (lo > hi) return std::nullopt;
    return std::pair{lo, hi};
}

// Largest total weight of closed intervals sharing a point.
double max_overlap(std::vector<std::tuple<double, int, double>>& events) {
    std::sort(events.begin(), events.end());
    double cur = 0, best = 0;
    for (const auto& [x, kind, w] : events) {
        cur += kind == 0 ? w : -w;
        best = std::max(best, cur);
    }
    return best;
}

}  // namespace

NormReport thurston_norm_estimate(const TrackGeometry& g, const Multicurve& mc, int sample_count, int threads) {
    const TrainTrack& tt = *g.tt;
    NormReport r;
    r.sup_norm = sup_norm(weights_from_multicurve(tt, mc));
    Multicurve res = resolve(tt, mc);
    double D = 0;
    for (const auto& c : res.components) D = std::max(D, fellow_travel_distance(g, c.path));
    r.d = D + g.max_edge_length();
    r.C = covering_bound(r.d);

    // each center owns a cell of its segment; balls centered anywhere in the cell are examined
    std::vector<SkeletonSegment> segs = skeleton_segments(g);
    double total = 0;
    for (const auto& s : segs) total += s.length;
    struct Cell {
        Mat2 frame;
        double len;
    };
    std::vector<Cell> cells;
    std::vector<Point> centers;
    double half_cell = 0;
    for (const auto& s : segs) {
        int n = std::max(1, static_cast<int>(std::lround(sample_count * s.length / total)));
        for (int k = 0; k < n; ++k) {
            cells.push_back({s.start * translation(k * s.length / n), s.length / n});
            centers.push_back(frame_point(s.start * translation((k + 0.5) * s.length / n)));
        }
        half_cell = std::max(half_cell, s.length / n / 2);
    }
    r.centers = static_cast<int>(centers.size());

    // every carried lift meeting a unit ball passes through a path vertex within 1 + D of its center
    double reach = 1.0 + D + half_cell;
    auto near = lifted_vertices_near(
        g,
        [&](Point p) {
            double best = INFINITY;
            for (const Point& c : centers) best = std::min(best, cosh_distance(p, c));
            return std::acosh(std::max(1.0, best));
        },
        reach);
    std::vector<Point> vpos;
    for (const auto& lv : near) vpos.push_back(lv.point(g));
    std::vector<std::pair<Geodesic, double>> lifts;
    for (size_t c = 0; c < res.components.size(); ++c)
        for (const auto& l : lifts_through(g, res.components[c].path, near))
            lifts.push_back({l, to_double(res.components[c].weight)});

    std::vector<double> cell_mass(cells.size(), 0.0), point_mass(cells.size(), 0.0), edges(cells.size(), 0.0);
    double cr = std::cosh(reach - half_cell);
    parallel_for(cells.size(), threads, [&](size_t k) {
        int count = 0;
        for (size_t i = 0; i < near.size(); ++i)
            if (cosh_distance(vpos[i], centers[k]) <= cr) count += static_cast<int>(tt.vertices[near[i].vertex].cyclic.size());
        edges[k] = count;
        std::vector<std::tuple<double, int, double>> events;
        double at_center = 0;
        for (const auto& [l, w] : lifts) {
            if (distance_to_geodesic(centers[k], l.tail, l.head) <= 1.0) at_center += w;
            if (auto band = unit_band(cells[k].frame, cells[k].len, l)) {
                events.emplace_back(band->first, 0, w);
                events.emplace_back(band->second, 1, w);
            }
        }
        cell_mass[k] = std::max(max_overlap(events), at_center);
        point_mass[k] = at_center;
    });
    double pointwise = 0;
    for (size_t k = 0; k < cells.size(); ++k) {
        r.thurston_estimate = std::max(r.thurston_estimate, cell_mass[k]);
        pointwise = std::max(pointwise, point_mass[k]);
        r.k_prime = std::max(r.k_prime, edges[k]);
    }
    r.converged = r.thurston_estimate - pointwise <= 0.05 * r.thurston_estimate;
    return r;
}

namespace {

// Half-plane chart with the separating geodesic of a box on the imaginary axis.
struct SeparatorChart {
    double rot = 0, rv = INFINITY;

    SeparatorChart(IdealPoint u, IdealPoint v) {
        rot = std::numbers::pi - u.theta;
        rv = IdealPoint::from_angle(v.theta + rot).real();
    }
    double real(IdealPoint p) const {
        double x = IdealPoint::from_angle(p.theta + rot).real();
        if (std::isinf(rv)) return x;
        if (std::isinf(x)) return -rv;
        return x * rv / (rv - x);
    }
    Complex point(Point p) const {
        Complex w = p.w * std::polar(1.0, rot);
        Complex z = Complex(0, 1) * (1.0 + w) / (1.0 - w);
        if (std::isinf(rv)) return z;
        return z * rv / (rv - z);
    }
};

double box_mass_once(const TrackGeometry& g, const Multicurve& res, const GeodesicBox& box, double D) {
    IdealPoint u = IdealPoint::from_angle(box.I.hi.theta + arc_length(box.I.hi, box.J.lo) / 2);
    IdealPoint v = IdealPoint::from_angle(box.J.hi.theta + arc_length(box.J.hi, box.I.lo) / 2);
    SeparatorChart chart(u, v);
    double y1 = INFINITY, y2 = 0;
    for (IdealPoint a : {box.I.lo, box.I.hi})
        for (IdealPoint b : {box.J.lo, box.J.hi}) {
            double h = std::sqrt(std::abs(chart.real(a) * chart.real(b)));
            y1 = std::min(y1, h);
            y2 = std::max(y2, h);
        }
    auto dist = [&](Point p) {
        Complex z = chart.point(p);
        double y = std::abs(z.imag()), rho = std::abs(z);
        if (rho >= y1 && rho <= y2) return std::asinh(std::abs(z.real()) / y);
        double t = std::clamp(rho, y1, y2);
        return std::acosh(1.0 + std::norm(z - Complex(0, t)) / (2.0 * y * t));
    };
    double reach = D + g.max_edge_length() + 0.5;
    auto near = lifted_vertices_near(g, dist, reach);
    double total = 0;
    for (const auto& comp : res.components) {
        for (const auto& l : lifts_through(g, comp.path, near)) {
            for (IdealPoint x : {l.tail, l.head})
                for (IdealPoint e : {box.I.lo, box.I.hi, box.J.lo, box.J.hi})
                    if (angle_distance(x, e) <= 1e-9) throw BoundaryHit("carried endpoint on the box boundary");
            if (box.contains(l)) total += to_double(comp.weight);
        }
    }
    return total;
}

}  // namespace

double box_mass(const TrackGeometry& g, const Multicurve& mc, const GeodesicBox& box) {
    if (box.I.contains(box.J.lo) || box.I.contains(box.J.hi) || box.J.contains(box.I.lo))
        throw DegenerateBox("intervals overlap");
    Multicurve res = resolve(*g.tt, mc);
    if (res.components.empty()) return 0;
    double D = 0;
    for (const auto& c : res.components) D = std::max(D, fellow_travel_distance(g, c.path));
    GeodesicBox b = box;
    for (int attempt = 0;; ++attempt) {
        try {
            return box_mass_once(g, res, b, D);
        } catch (const BoundaryHit&) {
            if (attempt == 3) throw;
            double eps = 1e-7 * (attempt + 1);
            b.I = {IdealPoint::from_angle(box.I.lo.theta - eps), IdealPoint::from_angle(box.I.hi.theta + eps)};
            b.J = {IdealPoint::from_angle(box.J.lo.theta - eps), IdealPoint::from_angle(box.J.hi.theta + eps)};
        }
    }
}

nlohmann::json to_json(const EdgeWeightSystem& w) {
    nlohmann::json j;
    j["mode"] = w.exact ? "rational" : "float";
    nlohmann::json ws = nlohmann::json::object();
    for (size_t e = 0; e < w.size(); ++e) {
        std::string key = std::to_string(e + 1);
        if (w.exact)
            ws[key] = to_string(w.q[e]);
        else
            ws[key] = w.x[e];
    }
    j["weights"] = ws;
    return j;
}

namespace {

Rational rational_from_json(const nlohmann::json& v, const std::string& where) {
    if (v.is_string()) return rational_from_string(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number()) {
        try {
            return to_rational(v.get<double>());
        } catch (const IrrationalWeight& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    throw ParseError(where + ": expected a number or a \"p/q\" string");
}

}  // namespace

EdgeWeightSystem weights_from_json(const TrainTrack& tt, const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("weights") || !j["weights"].is_object())
        throw ParseError("$.weights: object expected");
    std::string mode = j.value("mode", "rational");
    if (mode != "rational" && mode != "float") throw ParseError("$.mode: expected \"rational\" or \"float\"");
    EdgeWeightSystem w = EdgeWeightSystem::zeros(tt, mode == "rational");
    for (auto& [key, v] : j["weights"].items()) {
        std::string where = "$.weights." + key;
        int id = 0;
        try {
            size_t used = 0;
            id = std::stoi(key, &used);
            if (used != key.size()) throw ParseError(where + ": bad edge id");
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(where + ": bad edge id");
        }
        if (id < 1 || id > static_cast<int>(tt.edges.size())) throw UnknownEdge(where + ": no edge " + key);
        if (w.exact) {
            w.q[id - 1] = rational_from_json(v, where);
            if (w.q[id - 1] < Rational(0)) throw ParseError(where + ": negative weight");
        } else {
            if (!v.is_number()) throw ParseError(where + ": number expected");
            w.x[id - 1] = v.get<double>();
            if (!(w.x[id - 1] >= 0)) throw ParseError(where + ": negative weight");
        }
    }
    return w;
}

nlohmann::json to_json(const TrainTrack& tt, const Multicurve& mc) {
    nlohmann::json j;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : mc.components) {
        nlohmann::json jc = to_json(tt, c.path);
        jc["weight"] = to_string(c.weight);
        comps.push_back(jc);
    }
    j["components"] = comps;
    if (mc.dehn_thurston) {
        j["dehn_thurston"] = {{"m", mc.dehn_thurston->m}, {"t", mc.dehn_thurston->t}};
        j["weight"] = to_string(mc.dt_weight);
    }
    return j;
}

DehnThurston dehn_thurston_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("$.dehn_thurston: object expected");
    DehnThurston dt;
    for (const char* key : {"m", "t"}) {
        if (!j.contains(key) || !j[key].is_array()) throw ParseError(std::string("$.dehn_thurston.") + key + ": array expected");
        for (size_t i = 0; i < j[key].size(); ++i) {
            const auto& v = j[key][i];
            if (!v.is_number_integer())
                throw ParseError(std::string("$.dehn_thurston.") + key + "[" + std::to_string(i) + "]: integer expected");
            (key[0] == 'm' ? dt.m : dt.t).push_back(v.get<long long>());
        }
    }
    return dt;
}

Multicurve multicurve_from_json(const TrainTrack& tt, const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("$: object expected");
    Multicurve mc;
    if (j.contains("components")) {
        if (!j["components"].is_array()) throw ParseError("$.components: array expected");
        for (size_t i = 0; i < j["components"].size(); ++i) {
            const auto& jc = j["components"][i];
            std::string where = "$.components[" + std::to_string(i) + "]";
            if (!jc.is_object()) throw ParseError(where + ": object expected");
            Component c;
            c.path = path_from_json(tt, jc);
            c.path.period = static_cast<int>(c.path.dedges.size());
            c.weight = jc.contains("weight") ? rational_from_json(jc["weight"], where + ".weight") : Rational(1);
            if (c.weight <= Rational(0)) throw ParseError(where + ".weight: positive weight expected");
            mc.components.push_back(c);
        }
    }
    if (j.contains("dehn_thurston")) {
        mc.dehn_thurston = dehn_thurston_from_json(j["dehn_thurston"]);
        mc.dt_weight = j.contains("weight") ? rational_from_json(j["weight"], "$.weight") : Rational(1);
        if (mc.dt_weight <= Rational(0)) throw ParseError("$.weight: positive weight expected");
    }
    if (!j.contains("components") && !j.contains("dehn_thurston"))
        throw ParseError("$: expected \"components\" or \"dehn_thurston\"");
    return mc;
}

}  // namespace lamtrack
