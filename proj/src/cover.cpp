#include "lamtrack/cover.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <unordered_map>

#include "lamtrack/errors.hpp"
#include "lamtrack/tolerance.hpp"

namespace lamtrack {

namespace {

bool same_point(IdealPoint a, IdealPoint b, double eps) { return angle_distance(a, b) <= eps; }

bool same_lift(const Geodesic& a, const Geodesic& b, double eps = 1e-7) {
    return (same_point(a.tail, b.tail, eps) && same_point(a.head, b.head, eps)) ||
           (same_point(a.tail, b.head, eps) && same_point(a.head, b.tail, eps));
}

// Connector-only smooth continuations from a lifted vertex along a first directed edge,
// stopping at cuff vertices. Returns the lifted end vertices and the paths.
void connector_paths(const TrackGeometry& g, const LiftedVertex& start, int first, int max_len,
                     std::vector<std::pair<LiftedVertex, std::vector<int>>>& out) {
    const TrainTrack& tt = *g.tt;
    std::vector<int> path{first};
    std::function<void(const LiftedVertex&)> rec = [&](const LiftedVertex& at) {
        int arrival = path.back() ^ 1;
        if (tt.vertices[at.vertex].on_cuff) {
            out.push_back({at, path});
            return;
        }
        if (static_cast<int>(path.size()) >= max_len) return;
        const auto& v = tt.vertices[at.vertex];
        int s = tt.side_of(arrival);
        for (size_t k = 0; k < v.cyclic.size(); ++k) {
            if (v.side[k] == s) continue;
            int d = v.cyclic[k];
            path.push_back(d);
            rec(at.along(g, d));
            path.pop_back();
        }
    };
    rec(start.along(g, first));
}

struct VertexIndex {
    std::unordered_map<long long, std::vector<int>> buckets;
    std::vector<LiftedVertex> items;
    std::vector<Point> points;

    static long long key(int v, long long x, long long y) {
        return (static_cast<long long>(v) * 1000003LL + x) * 1000000007LL + y;
    }

    int find_or_add(const TrackGeometry& g, const LiftedVertex& lv, bool& added) {
        Point p = lv.point(g);
        constexpr double q = 1e-8;
        long long bx = std::llround(p.w.real() / q), by = std::llround(p.w.imag() / q);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find(key(lv.vertex, bx + dx, by + dy));
                if (it == buckets.end()) continue;
                for (int i : it->second)
                    if (std::abs(points[i].w - p.w) < 5e-9) {
                        added = false;
                        return i;
                    }
            }
        items.push_back(lv);
        points.push_back(p);
        buckets[key(lv.vertex, bx, by)].push_back(static_cast<int>(items.size()) - 1);
        added = true;
        return static_cast<int>(items.size()) - 1;
    }
};

Mat2 power(const Mat2& m, int n) {
    Mat2 r;
    Mat2 b = n >= 0 ? m : m.inverse();
    for (int i = 0; i < std::abs(n); ++i) r = r * b;
    return r;
}

}  // namespace

bool GeodesicBox::contains(const Geodesic& g, double eps) const {
    return (I.contains(g.tail, eps) && J.contains(g.head, eps)) ||
           (J.contains(g.tail, eps) && I.contains(g.head, eps));
}

TrackGeometry::TrackGeometry(const TrainTrack& t) : tt(&t) {
    for (const auto& p : t.pd.pants) models.push_back(pants_model(p));
    placement = holonomy(t.pd).placement;
    std::vector<Mat2> transition;
    for (const auto& c : t.cuffs) {
        if (c.side_b)
            transition.push_back(gluing_transition(models[c.side_a.pants], c.side_a.slot,
                                                   models[c.side_b->pants], c.side_b->slot, c.twist));
        else
            transition.push_back(Mat2{});
    }
    auto phi = [&](int vertex, int pants, int slot) {
        const TrackVertex& v = t.vertices[vertex];
        if (!v.on_cuff) return Mat2{};
        const Cuff& c = t.cuffs[v.cuff];
        if (c.side_a.pants == pants && c.side_a.slot == slot) return Mat2{};
        return transition[v.cuff];
    };
    for (const auto& e : t.edges) {
        Mat2 w;
        for (int s : e.seams) w = w * models[e.pants].seam_reflection[s];
        Mat2 m = phi(e.tail, e.pants, e.tail_slot) * w * phi(e.head, e.pants, e.head_slot).inverse();
        forward.push_back(m);
    }
    for (const auto& v : t.vertices) {
        if (v.on_cuff) {
            const Cuff& c = t.cuffs[v.cuff];
            position.push_back(frame_point(models[c.side_a.pants].midpoint_frame[c.side_a.slot]));
            continue;
        }
        int slot = -1;
        for (int h : v.cyclic) {
            const TrackEdge& e = t.edges[edge_of(h)];
            if (e.role == EdgeRole::Stem) {
                slot = e.slot;
                break;
            }
        }
        const PantsModel& m = models[v.pants];
        position.push_back(frame_point(m.midpoint_frame[slot] * rotation(std::numbers::pi / 2) * translation(0.25)));
    }
    for (size_t c = 0; c < t.cuffs.size(); ++c) cuff_element.push_back(forward[t.cuff_edge[c]]);
}

Mat2 TrackGeometry::step(int dedge) const {
    const Mat2& m = forward[edge_of(dedge)];
    return (dedge & 1) ? m.inverse() : m;
}

Mat2 TrackGeometry::product(const std::vector<int>& dedges) const {
    Mat2 r;
    for (int d : dedges) r = r * step(d);
    return r;
}

Mat2 TrackGeometry::home_placement(int vertex) const { return placement[tt->vertices[vertex].pants]; }

double TrackGeometry::max_edge_length() const {
    double best = 0;
    for (size_t e = 0; e < tt->edges.size(); ++e) {
        Point a = position[tt->edges[e].tail];
        Point b = apply(forward[e], position[tt->edges[e].head]);
        best = std::max(best, distance(a, b));
    }
    return best;
}

Mat2 closed_path_holonomy(const TrackGeometry& g, const EdgePath& p) {
    if (p.dedges.empty() || !is_edge_path(*g.tt, p) || !p.closed())
        throw NotCarried("not a closed edge path");
    Mat2 h = g.product(p.dedges);
    double tr = std::abs(h.trace()) / std::sqrt(std::abs(h.stable_det()));
    if (tr <= 2.0 + tolerance()) throw ParabolicOrElliptic("|trace| = " + std::to_string(tr));
    return h;
}

IdealPoint endpoint_of_path(const TrackGeometry& g, const EdgePath& p, const Mat2& base) {
    if (p.period <= 0) throw NotCarried("path is not eventually periodic");
    if (!is_edge_path(*g.tt, p)) throw NotCarried("not an edge path");
    size_t pre = p.dedges.size() - p.period;
    std::vector<int> prefix(p.dedges.begin(), p.dedges.begin() + pre);
    std::vector<int> cycle(p.dedges.begin() + pre, p.dedges.end());
    Mat2 h = g.product(cycle);
    return apply(base * g.product(prefix), axis(h).head);
}

Geodesic geodesic_of(const TrackGeometry& g, const std::vector<int>& back, const std::vector<int>& middle,
                     const std::vector<int>& ahead, const Mat2& base) {
    Geodesic out;
    out.tail = apply(base, axis(g.product(back)).tail);
    out.head = apply(base * g.product(middle), axis(g.product(ahead)).head);
    return out;
}

Geodesic cuff_lift(const TrackGeometry& g, const LiftedVertex& v) {
    const TrackVertex& tv = g.tt->vertices[v.vertex];
    if (!tv.on_cuff) throw NotSpanning("vertex is not on a cuff");
    Geodesic a = axis(g.cuff_element[tv.cuff]);
    return {apply(v.placement, a.tail), apply(v.placement, a.head)};
}

double liouville_real(double a, double b, double c, double d) {
    if (!(a < b && b < c && c < d)) {
        if (b == c || a == d) throw DegenerateBox("shared endpoint");
        throw DegenerateBox("endpoints out of order");
    }
    if (std::isinf(d)) return std::log((c - a) / (c - b));
    return std::log((c - a) * (d - b) / ((c - b) * (d - a)));
}

double liouville(const GeodesicBox& box) {
    IdealPoint a = box.I.lo, b = box.I.hi, c = box.J.lo, d = box.J.hi;
    double eps = 1e-15;
    if (angle_distance(b, c) <= eps || angle_distance(d, a) <= eps) throw DegenerateBox("shared endpoint");
    if (box.I.contains(c) || box.I.contains(d) || box.J.contains(a) || box.J.contains(b))
        throw DegenerateBox("intervals overlap");
    double num = chord(c, a) * chord(d, b);
    double den = chord(c, b) * chord(d, a);
    return std::log(num / den);
}

bool is_connector_span(const TrainTrack& tt, const std::vector<int>& gamma) {
    if (gamma.empty()) return false;
    int H = static_cast<int>(tt.edges.size()) * 2;
    for (int d : gamma)
        if (d < 0 || d >= H || tt.edges[edge_of(d)].cuff_edge) return false;
    if (!is_edge_path(tt, EdgePath{gamma, 0})) return false;
    if (!tt.vertices[tt.tail_of(gamma.front())].on_cuff || !tt.vertices[tt.head_of(gamma.back())].on_cuff)
        return false;
    for (size_t i = 0; i + 1 < gamma.size(); ++i)
        if (tt.vertices[tt.head_of(gamma[i])].on_cuff) return false;
    return true;
}

bool is_cuff_span(const TrainTrack& tt, const std::vector<int>& gamma) {
    if (gamma.empty()) return false;
    int H = static_cast<int>(tt.edges.size()) * 2;
    for (int d : gamma)
        if (d < 0 || d >= H || d != gamma.front()) return false;
    return tt.edges[edge_of(gamma.front())].cuff_edge;
}

namespace {

// Extension of an arc needed to swallow a geodesic lying outside it, on the hi or lo end.
struct Extension {
    double hi = INFINITY, lo = INFINITY;
};

Extension extension(const IdealArc& arc, const Geodesic& l) {
    Extension e;
    if (arc.contains(l.tail, -1e-12) || arc.contains(l.head, -1e-12)) return e;
    double h = std::max(arc_length(arc.hi, l.tail), arc_length(arc.hi, l.head));
    double lo = std::max(arc_length(l.tail, arc.lo), arc_length(l.head, arc.lo));
    if (h < lo)
        e.hi = h;
    else
        e.lo = lo;
    return e;
}

IdealArc far_side(const Geodesic& a, const Geodesic& other) {
    IdealArc one{a.tail, a.head}, two{a.head, a.tail};
    IdealPoint probe = other.tail;
    return one.contains(probe) ? two : one;
}

std::vector<Geodesic> reachable_lifts(const TrackGeometry& g, const LiftedVertex& from, int first) {
    std::vector<std::pair<LiftedVertex, std::vector<int>>> paths;
    connector_paths(g, from, first, 12, paths);
    std::vector<Geodesic> out;
    for (const auto& [lv, p] : paths) out.push_back(cuff_lift(g, lv));
    return out;
}

double nearest_extension(const IdealArc& arc, const std::vector<Geodesic>& lifts, bool hi_side) {
    double best = INFINITY;
    for (const auto& l : lifts) {
        Extension e = extension(arc, l);
        best = std::min(best, hi_side ? e.hi : e.lo);
    }
    return best;
}

// Distances past one end of an arc to the nearest and farthest endpoint of the nearest lift lying beyond it.
std::pair<double, double> beyond(const IdealArc& arc, const std::vector<Geodesic>& lifts, bool hi_side) {
    std::pair<double, double> best{INFINITY, INFINITY};
    for (const auto& l : lifts) {
        if (arc.contains(l.tail, -1e-12) || arc.contains(l.head, -1e-12)) continue;
        double a = hi_side ? arc_length(arc.hi, l.tail) : arc_length(l.tail, arc.lo);
        double b = hi_side ? arc_length(arc.hi, l.head) : arc_length(l.head, arc.lo);
        if (std::max(a, b) < best.second) best = {std::min(a, b), std::max(a, b)};
    }
    return best;
}

IdealArc grow(const IdealArc& a, double lo, double hi) {
    return {IdealPoint::from_angle(a.lo.theta - lo), IdealPoint::from_angle(a.hi.theta + hi)};
}

double margin(const IdealArc& a, const IdealArc& b) {
    if (a.length() <= 0) return 0;
    return liouville(GeodesicBox{a, b});
}

void fill_margins(CarrierBoxes& cb) {
    const auto &I = cb.outer.I, &J = cb.outer.J, &Ip = cb.inner.I, &Jp = cb.inner.J;
    cb.margins = {margin(IdealArc{I.lo, Ip.lo}, J), margin(IdealArc{Ip.hi, I.hi}, J),
                  margin(I, IdealArc{J.lo, Jp.lo}), margin(I, IdealArc{Jp.hi, J.hi})};
}

CarrierBoxes connector_boxes(const TrackGeometry& g, const std::vector<int>& gamma, const Mat2& base) {
    const TrainTrack& tt = *g.tt;
    LiftedVertex v1{tt.tail_of(gamma.front()), base};
    LiftedVertex v2 = v1;
    for (int d : gamma) v2 = v2.along(g, d);
    Geodesic alpha = cuff_lift(g, v1), beta = cuff_lift(g, v2);
    if (same_lift(alpha, beta)) throw NotSpanning("span returns to its starting cuff lift");
    CarrierBoxes cb;
    cb.inner.I = far_side(alpha, beta);
    cb.inner.J = far_side(beta, alpha);

    auto outer = [&](const IdealArc& inner, const LiftedVertex& v, int first) {
        int cuff_edge = tt.cuff_edge[tt.vertices[v.vertex].cuff];
        double hi = INFINITY, lo = INFINITY;
        for (int n : {1, -1, 2, -2, 3, -3}) {
            LiftedVertex shifted{v.vertex, v.placement * power(g.step(forward(cuff_edge)), n)};
            auto lifts = reachable_lifts(g, shifted, first);
            hi = std::min(hi, nearest_extension(inner, lifts, true));
            lo = std::min(lo, nearest_extension(inner, lifts, false));
        }
        if (!std::isfinite(hi) || !std::isfinite(lo)) throw NotSpanning("no neighbouring cuff lifts");
        return grow(inner, lo, hi);
    };
    cb.outer.I = outer(cb.inner.I, v1, gamma.front());
    cb.outer.J = outer(cb.inner.J, v2, gamma.back() ^ 1);
    if (cb.outer.I.contains(cb.outer.J.lo) || cb.outer.I.contains(cb.outer.J.hi) ||
        cb.outer.J.contains(cb.outer.I.lo))
        throw NotSpanning("outer intervals overlap");
    fill_margins(cb);
    return cb;
}

// Connector half-edge at a cuff vertex on the side opposite to a half-edge.
int opposite_connector(const TrainTrack& tt, int vertex, int half) {
    const auto& v = tt.vertices[vertex];
    int s = tt.side_of(half);
    for (size_t k = 0; k < v.cyclic.size(); ++k)
        if (v.side[k] != s && !tt.edges[edge_of(v.cyclic[k])].cuff_edge) return v.cyclic[k];
    return -1;
}

CarrierBoxes cuff_boxes(const TrackGeometry& g, const std::vector<int>& gamma, const Mat2& base) {
    const TrainTrack& tt = *g.tt;
    int d = gamma.front();
    int vtx = tt.tail_of(d);
    LiftedVertex v1{vtx, base};
    LiftedVertex v2 = v1;
    for (int x : gamma) v2 = v2.along(g, x);
    Geodesic a = cuff_lift(g, v1);
    IdealPoint ahead = (d & 1) ? a.tail : a.head;
    IdealPoint behind = (d & 1) ? a.head : a.tail;
    int enter = opposite_connector(tt, vtx, d);
    int leave = opposite_connector(tt, vtx, d ^ 1);
    if (enter < 0 || leave < 0) throw NotSpanning("cuff span on a truncation boundary");
    Mat2 fwd = g.step(d);

    // lifts reachable through a connector, as arcs measured from an endpoint of the cuff lift
    auto span_from = [&](IdealPoint from, const std::vector<Geodesic>& lifts, bool ccw) {
        double far = 0;
        for (const auto& l : lifts)
            for (IdealPoint p : {l.tail, l.head}) far = std::max(far, ccw ? arc_length(from, p) : arc_length(p, from));
        return far;
    };
    auto side_ccw = [&](IdealPoint from, const std::vector<Geodesic>& lifts) {
        // true when the lifts sit counterclockwise of `from` before reaching the other endpoint
        IdealPoint other = angle_distance(from, a.tail) < 1e-12 ? a.head : a.tail;
        return arc_length(from, lifts.front().tail) < arc_length(from, other);
    };

    auto in1 = reachable_lifts(g, v1, enter);
    auto out2 = reachable_lifts(g, v2, leave);
    if (in1.empty() || out2.empty()) throw NotSpanning("no neighbouring cuff lifts");
    bool in_ccw = side_ccw(behind, in1);
    bool out_ccw = side_ccw(ahead, out2);
    CarrierBoxes cb;
    cb.cuff_span = true;
    double ie = span_from(behind, in1, in_ccw), je = span_from(ahead, out2, out_ccw);
    cb.inner.I = in_ccw ? IdealArc{behind, IdealPoint::from_angle(behind.theta + ie)}
                        : IdealArc{IdealPoint::from_angle(behind.theta - ie), behind};
    cb.inner.J = out_ccw ? IdealArc{ahead, IdealPoint::from_angle(ahead.theta + je)}
                         : IdealArc{IdealPoint::from_angle(ahead.theta - je), ahead};

    // grow past the inner arcs using the next vertices outward along the cuff lift
    // lifts reachable from the vertices n steps along the cuff lift from v
    auto nearby = [&](const LiftedVertex& v, int dir, int connector) {
        std::vector<Geodesic> out;
        Mat2 m = v.placement;
        for (int n = 1; n <= 3; ++n) {
            m = m * (dir > 0 ? fwd : fwd.inverse());
            auto more = reachable_lifts(g, LiftedVertex{vtx, m}, connector);
            out.insert(out.end(), more.begin(), more.end());
        }
        return out;
    };
    auto in_more = nearby(v1, 1, enter);
    auto in_other = nearby(v1, -1, leave);
    auto out_more = nearby(v2, -1, leave);
    auto out_other = nearby(v2, 1, enter);
    // the far side stops halfway to the next vertex's lifts; across the cuff lift the nearest lift is swallowed
    auto grow_arc = [&](const IdealArc& inner, const std::vector<Geodesic>& far_side_lifts,
                        const std::vector<Geodesic>& across, bool ccw) {
        double a_far = beyond(inner, far_side_lifts, ccw).first / 2;
        double a_across = beyond(inner, across, !ccw).second;
        if (!std::isfinite(a_far) || !std::isfinite(a_across)) throw NotSpanning("cannot enlarge the cuff box");
        return ccw ? grow(inner, a_across, a_far) : grow(inner, a_far, a_across);
    };
    cb.outer.I = grow_arc(cb.inner.I, in_more, in_other, in_ccw);
    cb.outer.J = grow_arc(cb.inner.J, out_more, out_other, out_ccw);
    if (cb.outer.I.contains(cb.outer.J.lo) || cb.outer.I.contains(cb.outer.J.hi) ||
        cb.outer.J.contains(cb.outer.I.lo))
        throw NotSpanning("outer intervals overlap");
    fill_margins(cb);
    return cb;
}

}  // namespace

CarrierBoxes carrier_boxes(const TrackGeometry& g, const std::vector<int>& gamma, const Mat2& base) {
    if (is_connector_span(*g.tt, gamma)) return connector_boxes(g, gamma, base);
    if (is_cuff_span(*g.tt, gamma)) return cuff_boxes(g, gamma, base);
    throw NotSpanning("path is neither a connector span nor a cuff span");
}

std::vector<std::vector<int>> connector_spans(const TrainTrack& tt, int max_len) {
    std::vector<std::vector<int>> out;
    for (int c = 0; c < static_cast<int>(tt.cuffs.size()); ++c) {
        const auto& v = tt.vertices[tt.cuff_vertex[c]];
        for (int h : v.cyclic) {
            if (tt.edges[edge_of(h)].cuff_edge) continue;
            std::vector<int> path{h};
            std::function<void()> rec = [&]() {
                int at = tt.head_of(path.back());
                if (tt.vertices[at].on_cuff) {
                    out.push_back(path);
                    return;
                }
                if (static_cast<int>(path.size()) >= max_len) return;
                const auto& w = tt.vertices[at];
                int s = tt.side_of(path.back() ^ 1);
                for (size_t k = 0; k < w.cyclic.size(); ++k) {
                    if (w.side[k] == s) continue;
                    path.push_back(w.cyclic[k]);
                    rec();
                    path.pop_back();
                }
            };
            rec();
        }
    }
    return out;
}

WalkTail random_tail(const TrainTrack& tt, int arrival_half, int min_steps, std::mt19937_64& rng) {
    WalkTail w;
    int in = arrival_half;
    for (int steps = 0;; ++steps) {
        int v = tt.half_vertex(in);
        const auto& tv = tt.vertices[v];
        int s = tt.side_of(in);
        std::vector<int> options;
        for (size_t k = 0; k < tv.cyclic.size(); ++k)
            if (tv.side[k] != s) options.push_back(tv.cyclic[k]);
        if (tv.on_cuff && steps >= min_steps) {
            for (int o : options)
                if (tt.edges[edge_of(o)].cuff_edge) {
                    w.cycle = o;
                    return w;
                }
        }
        int pick = options[std::uniform_int_distribution<size_t>(0, options.size() - 1)(rng)];
        w.finite.push_back(pick);
        in = pick ^ 1;
    }
}

SpanCheck monte_carlo_span_check(const TrackGeometry& g, const std::vector<int>& gamma, const CarrierBoxes& boxes,
                                 int samples, std::mt19937_64& rng, const Mat2& base) {
    const TrainTrack& tt = *g.tt;
    SpanCheck out;
    std::uniform_int_distribution<int> len(0, 6);
    LiftedVertex v1{tt.tail_of(gamma.front()), base};
    auto geodesic = [&](const LiftedVertex& start, const WalkTail& back, const std::vector<int>& middle,
                        const WalkTail& ahead) {
        Geodesic gd;
        gd.tail = apply(start.placement * g.product(back.finite), axis(g.step(back.cycle)).head);
        std::vector<int> mid = middle;
        mid.insert(mid.end(), ahead.finite.begin(), ahead.finite.end());
        gd.head = apply(start.placement * g.product(mid), axis(g.step(ahead.cycle)).head);
        return gd;
    };
    while (out.through < samples) {
        WalkTail back = random_tail(tt, gamma.front(), len(rng), rng);
        WalkTail ahead = random_tail(tt, gamma.back() ^ 1, len(rng), rng);
        Geodesic gd = geodesic(v1, back, gamma, ahead);
        ++out.through;
        if (boxes.inner.contains(gd, 1e-9)) ++out.through_inside;
    }

    // lifted vertices near the span
    std::vector<LiftedVertex> ball{v1};
    VertexIndex index;
    bool added;
    index.find_or_add(g, v1, added);
    std::deque<std::pair<LiftedVertex, int>> queue{{v1, 0}};
    while (!queue.empty()) {
        auto [lv, depth] = queue.front();
        queue.pop_front();
        if (depth >= 4) continue;
        for (int h : tt.vertices[lv.vertex].cyclic) {
            LiftedVertex nb = lv.along(g, h);
            index.find_or_add(g, nb, added);
            if (!added) continue;
            ball.push_back(nb);
            queue.push_back({nb, depth + 1});
        }
    }
    Point p1 = v1.point(g);
    LiftedVertex v2 = v1;
    for (int d : gamma) v2 = v2.along(g, d);
    Point p2 = v2.point(g);
    std::vector<int> reversed_gamma;
    for (auto it = gamma.rbegin(); it != gamma.rend(); ++it) reversed_gamma.push_back(*it ^ 1);
    // lifted vertices and directed edges of the whole walk, both directions computed outward from the start
    auto contains_gamma = [&](const std::vector<LiftedVertex>& at, const std::vector<int>& seq) {
        auto match = [&](size_t i, const LiftedVertex& from, Point p, const std::vector<int>& span) {
            return at[i].vertex == from.vertex && i + span.size() <= seq.size() &&
                   std::equal(span.begin(), span.end(), seq.begin() + static_cast<long>(i)) &&
                   std::abs(at[i].point(g).w - p.w) < 1e-9;
        };
        for (size_t i = 0; i < seq.size(); ++i) {
            if (match(i, v1, p1, gamma) || match(i, v2, p2, reversed_gamma)) return true;
        }
        return false;
    };
    const std::array<Geodesic, 2> flanks{cuff_lift(g, v1), cuff_lift(g, v2)};
    const int wraps = is_cuff_span(tt, gamma) ? static_cast<int>(gamma.size()) + 16 : 1;
    int attempts = 0;
    while (out.avoiding < samples && attempts < 100 * samples) {
        ++attempts;
        const LiftedVertex& s = ball[std::uniform_int_distribution<size_t>(0, ball.size() - 1)(rng)];
        const auto& cyc = tt.vertices[s.vertex].cyclic;
        int d0 = cyc[std::uniform_int_distribution<size_t>(0, cyc.size() - 1)(rng)];
        WalkTail back = random_tail(tt, d0, len(rng), rng);
        WalkTail ahead = random_tail(tt, d0 ^ 1, len(rng), rng);
        std::vector<int> outward = back.finite, onward{d0};
        outward.insert(outward.end(), wraps, back.cycle);
        onward.insert(onward.end(), ahead.finite.begin(), ahead.finite.end());
        onward.insert(onward.end(), wraps, ahead.cycle);
        std::vector<LiftedVertex> behind{s}, front{s};
        for (int x : outward) behind.push_back(behind.back().along(g, x));
        for (int x : onward) front.push_back(front.back().along(g, x));
        std::vector<LiftedVertex> at(behind.rbegin(), behind.rend());
        at.insert(at.end(), front.begin() + 1, front.end());
        std::vector<int> seq;
        for (auto it = outward.rbegin(); it != outward.rend(); ++it) seq.push_back(*it ^ 1);
        seq.insert(seq.end(), onward.begin(), onward.end());
        if (contains_gamma(at, seq)) continue;
        Geodesic gd = geodesic(s, back, {d0}, ahead);
        // geodesics asymptotic to the end cuff lifts sit on the box boundary
        bool asymptotic = false;
        for (const auto& f : flanks)
            for (IdealPoint x : {gd.tail, gd.head})
                asymptotic = asymptotic || same_point(x, f.tail, 1e-12) || same_point(x, f.head, 1e-12);
        if (asymptotic) continue;
        ++out.avoiding;
        if (!boxes.outer.contains(gd, 1e-12)) ++out.avoiding_outside;
    }
    return out;
}

namespace {

// Do two lifted cuff vertices lie on the same cuff lift? Compared in the frame of the first, where
// its lift has unit scale.
bool on_same_cuff_lift(const TrackGeometry& g, const LiftedVertex& a, const LiftedVertex& b) {
    const auto& va = g.tt->vertices[a.vertex];
    const auto& vb = g.tt->vertices[b.vertex];
    if (va.cuff != vb.cuff) return false;
    Geodesic ax = axis(g.cuff_element[va.cuff]);
    Mat2 m = a.placement.inverse() * b.placement;
    return same_lift(ax, {apply(m, ax.tail), apply(m, ax.head)});
}

}  // namespace

int backtracking_violations(const TrackGeometry& g, int max_len) {
    const TrainTrack& tt = *g.tt;
    int violations = 0;
    std::vector<LiftedVertex> visited;  // one vertex per cuff lift entered so far
    // Enters `next` along d; false if that returns to a cuff lift already left.
    auto enter = [&](const LiftedVertex& next, int d, bool& pushed) {
        pushed = false;
        if (!tt.vertices[next.vertex].on_cuff || tt.edges[edge_of(d)].cuff_edge) return true;
        for (const auto& x : visited)
            if (on_same_cuff_lift(g, x, next)) return false;
        visited.push_back(next);
        pushed = true;
        return true;
    };
    std::function<void(const LiftedVertex&, int, int)> rec = [&](const LiftedVertex& at, int arrival, int depth) {
        if (depth >= max_len) return;
        const auto& v = tt.vertices[at.vertex];
        int s = tt.side_of(arrival);
        for (size_t k = 0; k < v.cyclic.size(); ++k) {
            if (v.side[k] == s) continue;
            int d = v.cyclic[k];
            LiftedVertex next = at.along(g, d);
            bool pushed;
            if (!enter(next, d, pushed)) {
                ++violations;
                continue;
            }
            rec(next, d ^ 1, depth + 1);
            if (pushed) visited.pop_back();
        }
    };
    for (int d0 = 0; d0 < static_cast<int>(tt.edges.size()) * 2; ++d0) {
        LiftedVertex start{tt.tail_of(d0), Mat2{}};
        visited.clear();
        if (tt.vertices[start.vertex].on_cuff) visited.push_back(start);
        LiftedVertex next = start.along(g, d0);
        bool pushed;
        if (!enter(next, d0, pushed)) {
            ++violations;
            continue;
        }
        rec(next, d0 ^ 1, 1);
    }
    return violations;
}

int duplicate_connector_paths(const TrackGeometry& g) {
    const TrainTrack& tt = *g.tt;
    int duplicates = 0;
    for (int c = 0; c < static_cast<int>(tt.cuffs.size()); ++c) {
        int vtx = tt.cuff_vertex[c];
        Mat2 step = g.cuff_element[c];
        std::vector<std::pair<Geodesic, std::vector<int>>> found;
        for (int n = -2; n <= 2; ++n) {
            LiftedVertex start{vtx, power(step, n)};
            for (int h : tt.vertices[vtx].cyclic) {
                if (tt.edges[edge_of(h)].cuff_edge) continue;
                std::vector<std::pair<LiftedVertex, std::vector<int>>> paths;
                connector_paths(g, start, h, 16, paths);
                for (auto& [lv, p] : paths) {
                    Geodesic l = cuff_lift(g, lv);
                    for (const auto& [other, q] : found)
                        if (same_lift(other, l)) ++duplicates;
                    found.push_back({l, p});
                }
            }
        }
    }
    return duplicates;
}

std::vector<LiftedVertex> lifted_vertices_near(const TrackGeometry& g, const std::function<double(Point)>& dist,
                                               double radius, double slack) {
    const TrainTrack& tt = *g.tt;
    LiftedVertex at{0, g.home_placement(0)};
    double best = dist(at.point(g));
    for (bool moved = true; moved;) {
        moved = false;
        for (int h : tt.vertices[at.vertex].cyclic) {
            LiftedVertex nb = at.along(g, h);
            double dn = dist(nb.point(g));
            if (dn < best - 1e-12) {
                best = dn;
                at = nb;
                moved = true;
                break;
            }
        }
    }
    if (slack < 0) slack = g.max_edge_length() + 1.0;
    VertexIndex index;
    bool added;
    index.find_or_add(g, at, added);
    std::deque<LiftedVertex> queue{at};
    std::vector<LiftedVertex> out;
    while (!queue.empty()) {
        LiftedVertex lv = queue.front();
        queue.pop_front();
        double d = dist(lv.point(g));
        if (d <= radius) out.push_back(lv);
        if (d > radius + slack) continue;
        for (int h : tt.vertices[lv.vertex].cyclic) {
            LiftedVertex nb = lv.along(g, h);
            index.find_or_add(g, nb, added);
            if (added) queue.push_back(nb);
        }
    }
    return out;
}

nlohmann::json to_json(const Geodesic& g) { return {{"chart", "angle"}, {"tail", g.tail.theta}, {"head", g.head.theta}}; }

nlohmann::json to_json(const GeodesicBox& b) {
    return {{"chart", "angle"}, {"I", {b.I.lo.theta, b.I.hi.theta}}, {"J", {b.J.lo.theta, b.J.hi.theta}}};
}

GeodesicBox box_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("box: expected an object");
    if (j.value("chart", "angle") != "angle") throw ParseError("box.chart: only \"angle\" is supported");
    auto arc = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2 || !j[key][0].is_number() ||
            !j[key][1].is_number())
            throw ParseError(std::string("box.") + key + ": expected [lo, hi]");
        return IdealArc{IdealPoint::from_angle(j[key][0].get<double>()), IdealPoint::from_angle(j[key][1].get<double>())};
    };
    return {arc("I"), arc("J")};
}

}  // namespace lamtrack
