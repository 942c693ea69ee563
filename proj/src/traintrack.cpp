#include "lamtrack/traintrack.hpp"

#include <algorithm>
#include <map>

#include "lamtrack/errors.hpp"

namespace lamtrack {

StandardChoice StandardChoice::defaults(const PantsDecomposition& pd) {
    return make(pd, {}, {});
}

StandardChoice StandardChoice::make(const PantsDecomposition& pd, std::vector<TrackType> types,
                                    const std::vector<Tangency>& per_cuff) {
    StandardChoice c;
    if (types.empty())
        for (const auto& p : pd.pants) types.push_back(default_type(p));
    c.types = std::move(types);
    c.tangency.assign(pd.pants.size(), {Tangency::Left, Tangency::Left, Tangency::Left});
    if (!per_cuff.empty()) {
        auto cs = pd.cuffs();
        for (size_t k = 0; k < cs.size() && k < per_cuff.size(); ++k) {
            c.tangency[cs[k].side_a.pants][cs[k].side_a.slot] = per_cuff[k];
            if (cs[k].side_b) c.tangency[cs[k].side_b->pants][cs[k].side_b->slot] = per_cuff[k];
        }
    }
    return c;
}

int TrainTrack::half_vertex(int half) const {
    const TrackEdge& e = edges.at(edge_of(half));
    return (half & 1) ? e.head : e.tail;
}

int TrainTrack::position(int half) const {
    const auto& cyc = vertices[half_vertex(half)].cyclic;
    return static_cast<int>(std::find(cyc.begin(), cyc.end(), half) - cyc.begin());
}

int TrainTrack::side_of(int half) const { return vertices[half_vertex(half)].side[position(half)]; }

TrainTrack build_track(const PantsDecomposition& pd, const StandardChoice& choice) {
    validate_structure(pd);
    if (choice.types.size() != pd.pants.size() || choice.tangency.size() != pd.pants.size())
        throw MalformedTrack("choice does not match the decomposition");
    for (size_t p = 0; p < pd.pants.size(); ++p) {
        auto ok = valid_types(pd.pants[p]);
        if (std::find(ok.begin(), ok.end(), choice.types[p]) == ok.end())
            throw MalformedTrack("track type not available for pants " + std::to_string(pd.pants[p].id));
    }
    for (const auto& g : pd.gluings)
        if (choice.tangency[g.a.pants][g.a.slot] != choice.tangency[g.b.pants][g.b.slot])
            throw TangencyMismatch("pants " + std::to_string(pd.pants[g.a.pants].id) + " slot " +
                                   std::to_string(g.a.slot) + " against pants " +
                                   std::to_string(pd.pants[g.b.pants].id) + " slot " + std::to_string(g.b.slot));

    TrainTrack tt;
    tt.pd = pd;
    tt.choice = choice;
    tt.cuffs = pd.cuffs();
    auto idx = pd.cuff_index();

    auto add_edge = [&](int tail, int head, std::vector<int> seams, std::string name, int pants,
                        EdgeRole role = EdgeRole::Cuff, int slot = -1) {
        TrackEdge e;
        e.role = role;
        e.slot = slot;
        e.tail = tail;
        e.head = head;
        e.seams = std::move(seams);
        e.name = std::move(name);
        e.pants = pants;
        tt.edges.push_back(e);
        return static_cast<int>(tt.edges.size()) - 1;
    };
    auto add_vertex = [&](int pants) {
        TrackVertex v;
        v.pants = pants;
        tt.vertices.push_back(v);
        return static_cast<int>(tt.vertices.size()) - 1;
    };

    for (size_t c = 0; c < tt.cuffs.size(); ++c) {
        const Cuff& cf = tt.cuffs[c];
        int v = add_vertex(cf.side_a.pants);
        tt.vertices[v].on_cuff = true;
        tt.vertices[v].cuff = static_cast<int>(c);
        int s = cf.side_a.slot;
        int e = add_edge(v, v, {s, (s + 2) % 3}, "cuff" + std::to_string(c), cf.side_a.pants);
        tt.edges[e].cuff_edge = true;
        tt.edges[e].cuff = static_cast<int>(c);
        tt.edges[e].tail_slot = tt.edges[e].head_slot = s;
        tt.cuff_vertex.push_back(v);
        tt.cuff_edge.push_back(e);
    }

    std::vector<std::array<int, 3>> conn(pd.pants.size(), {-1, -1, -1});
    auto tail = [](int e) { return 2 * e; };
    auto head = [](int e) { return 2 * e + 1; };

    for (size_t pi = 0; pi < pd.pants.size(); ++pi) {
        int p = static_cast<int>(pi);
        const auto& pants = pd.pants[p];
        auto a = [&](int slot) { return tt.cuff_vertex[idx[p][slot]]; };
        std::string tag = "p" + std::to_string(pants.id) + ".";
        TrackType type = choice.types[p];
        if (type.theta()) {
            std::array<int, 3> s{}, stem{}, branch{};
            for (int i = 0; i < 3; ++i) s[i] = add_vertex(p);
            for (int i = 0; i < 3; ++i) {
                stem[i] = add_edge(a(i), s[i], {}, tag + "stem" + std::to_string(i), p, EdgeRole::Stem, i);
                tt.edges[stem[i]].tail_slot = i;
                conn[p][i] = tail(stem[i]);
            }
            for (int i = 0; i < 3; ++i)
                branch[i] = add_edge(s[i], s[(i + 1) % 3], {}, tag + "branch" + std::to_string(i) +
                                                                 std::to_string((i + 1) % 3),
                                     p, EdgeRole::Branch, i);
            for (int i = 0; i < 3; ++i) {
                auto& v = tt.vertices[s[i]];
                v.cyclic = {head(stem[i]), tail(branch[i]), head(branch[(i + 2) % 3])};
                v.side = {0, 1, 1};
            }
            continue;
        }
        int i = type.self_slot, j = (i + 1) % 3, k = (i + 2) % 3;
        int s = add_vertex(p);
        int stem = add_edge(a(i), s, {}, tag + "stem" + std::to_string(i), p, EdgeRole::Stem, i);
        tt.edges[stem].tail_slot = i;
        conn[p][i] = tail(stem);
        std::vector<int> cyc{head(stem)};
        std::vector<int> punct;
        if (!pants.slots[j].cusp) {
            int t = add_vertex(p);
            int lin = add_edge(s, t, {}, tag + "loop" + std::to_string(j) + "a", p, EdgeRole::LoopOut, j);
            int lout = add_edge(t, s, {i, j}, tag + "loop" + std::to_string(j) + "b", p, EdgeRole::LoopBack, j);
            int stem_j = add_edge(a(j), t, {}, tag + "stem" + std::to_string(j), p, EdgeRole::Stem, j);
            tt.edges[stem_j].tail_slot = j;
            conn[p][j] = tail(stem_j);
            cyc.push_back(tail(lin));
            cyc.push_back(head(lout));
            tt.vertices[t].cyclic = {head(lin), tail(lout), head(stem_j)};
            tt.vertices[t].side = {0, 1, 0};
        } else {
            int loop = add_edge(s, s, {i, j}, tag + "loop" + std::to_string(j), p, EdgeRole::Loop, j);
            cyc.push_back(tail(loop));
            cyc.push_back(head(loop));
            punct.push_back(1);
        }
        if (!pants.slots[k].cusp) {
            int r = add_edge(s, a(k), {}, tag + "arc" + std::to_string(i) + std::to_string(k), p, EdgeRole::Arc, k);
            tt.edges[r].head_slot = k;
            conn[p][k] = head(r);
            cyc.push_back(tail(r));
        } else {
            punct.push_back(static_cast<int>(cyc.size()) - 1);
        }
        tt.vertices[s].cyclic = cyc;
        tt.vertices[s].side.assign(cyc.size(), 1);
        tt.vertices[s].side[0] = 0;
        tt.vertices[s].punctures = punct;
    }

    for (size_t c = 0; c < tt.cuffs.size(); ++c) {
        const Cuff& cf = tt.cuffs[c];
        auto& v = tt.vertices[tt.cuff_vertex[c]];
        int e = tt.cuff_edge[c];
        bool left = choice.tangency[cf.side_a.pants][cf.side_a.slot] == Tangency::Left;
        v.cyclic = {tail(e), conn[cf.side_a.pants][cf.side_a.slot], head(e)};
        if (cf.side_b) {
            v.cyclic.push_back(conn[cf.side_b->pants][cf.side_b->slot]);
            v.side = left ? std::vector<int>{0, 1, 1, 0} : std::vector<int>{0, 0, 1, 1};
        } else {
            v.side = left ? std::vector<int>{0, 1, 1} : std::vector<int>{0, 0, 1};
        }
    }
    return tt;
}

std::string to_string(RegionKind k) {
    switch (k) {
        case RegionKind::Triangle: return "triangle";
        case RegionKind::PuncturedMonogon: return "punctured_monogon";
        case RegionKind::Boundary: return "boundary";
    }
    return "?";
}

std::vector<Region> regions(const TrainTrack& tt) {
    int H = static_cast<int>(tt.edges.size()) * 2;
    std::vector<bool> seen(H, false);
    std::vector<Region> out;
    for (int start = 0; start < H; ++start) {
        if (seen[start]) continue;
        Region r;
        int d = start;
        int punctures = 0;
        do {
            seen[d] = true;
            r.boundary.push_back(d);
            int in = d ^ 1;
            const auto& v = tt.vertices[tt.half_vertex(in)];
            int deg = static_cast<int>(v.cyclic.size());
            int pos = tt.position(in);
            int corner = (pos + deg - 1) % deg;
            if (v.side[corner] == v.side[pos]) ++r.cusps;
            punctures += static_cast<int>(std::count(v.punctures.begin(), v.punctures.end(), corner));
            d = v.cyclic[corner];
        } while (d != start);
        if (punctures > 1) throw MalformedTrack("region with more than one puncture");
        r.punctured = punctures == 1;
        if (r.cusps == 0) {
            bool boundary = r.boundary.size() == 1 && !r.punctured;
            if (boundary) {
                const TrackEdge& e = tt.edges[edge_of(r.boundary[0])];
                boundary = e.cuff_edge && !tt.cuffs[e.cuff].side_b && (r.boundary[0] & 1);
            }
            if (!boundary) throw MalformedTrack("smooth region that is not a truncation boundary");
            r.kind = RegionKind::Boundary;
        } else if (r.cusps == 1 && r.punctured) {
            r.kind = RegionKind::PuncturedMonogon;
        } else if (r.cusps == 3 && !r.punctured) {
            r.kind = RegionKind::Triangle;
        } else {
            throw MalformedTrack("region with " + std::to_string(r.cusps) + " cusps" +
                                 (r.punctured ? " and a puncture" : ""));
        }
        out.push_back(r);
    }
    int punctures = 0, unglued = 0;
    for (const auto& p : tt.pd.pants) punctures += p.cusp_count();
    for (const auto& c : tt.cuffs) unglued += c.side_b ? 0 : 1;
    long euler = static_cast<long>(tt.vertices.size()) - static_cast<long>(tt.edges.size()) +
                 static_cast<long>(out.size());
    long expect = -static_cast<long>(tt.pd.pants.size()) + punctures + unglued;
    if (euler != expect)
        throw MalformedTrack("Euler characteristic " + std::to_string(euler) + " != " + std::to_string(expect));
    return out;
}

namespace {

void check_ids(const TrainTrack& tt, const EdgePath& p) {
    int H = static_cast<int>(tt.edges.size()) * 2;
    for (int d : p.dedges)
        if (d < 0 || d >= H) throw UnknownEdge("edge " + std::to_string(signed_id(d)));
}

bool smooth(const TrainTrack& tt, int d1, int d2) {
    return tt.head_of(d1) == tt.tail_of(d2) && tt.side_of(d1 ^ 1) != tt.side_of(d2);
}

bool ccw_between(const TrainTrack& tt, int v, int from, int to, int x) {
    int deg = static_cast<int>(tt.vertices[v].cyclic.size());
    int pf = tt.position(from), pt = tt.position(to), px = tt.position(x);
    int ox = (px - pf + deg) % deg, ot = (pt - pf + deg) % deg;
    return ox > 0 && ox < ot;
}

// Is x on the left of a path passing through v from half-edge in to half-edge out?
bool left_of(const TrainTrack& tt, int v, int in, int out, int x) { return ccw_between(tt, v, out, in, x); }

struct Seq {
    std::vector<int> d;
    bool cyclic;
    int n() const { return static_cast<int>(d.size()); }
    bool valid(long i) const { return cyclic || (i >= 0 && i < n()); }
    int at(long i) const {
        long n = static_cast<long>(d.size());
        return d[static_cast<size_t>(((i % n) + n) % n)];
    }
};

Seq unroll(const EdgePath& p) {
    if (p.closed()) return {p.dedges, true};
    std::vector<int> d = p.dedges;
    if (p.period > 0) {
        std::vector<int> cyc(p.dedges.end() - p.period, p.dedges.end());
        for (int r = 0; r < 3; ++r) d.insert(d.end(), cyc.begin(), cyc.end());
    }
    return {d, false};
}

bool cross_oriented(const TrainTrack& tt, const Seq& A, const Seq& B, bool same) {
    long cap = static_cast<long>(A.n()) + B.n() + 1;
    for (long i = A.cyclic ? 0 : 1; i < A.n(); ++i) {
        for (long j = B.cyclic ? 0 : 1; j < B.n(); ++j) {
            if (same && i == j) continue;
            int v = tt.tail_of(A.at(i));
            if (tt.tail_of(B.at(j)) != v) continue;
            int hin = A.at(i - 1) ^ 1, hin2 = B.at(j - 1) ^ 1, hout = A.at(i);
            if (hin == hin2 || hin2 == hout) continue;
            bool left_start = left_of(tt, v, hin, hout, hin2);
            long r = 0;
            bool open = false;
            while (true) {
                if (!A.valid(i + r) || !B.valid(j + r)) {
                    open = true;
                    break;
                }
                if (A.at(i + r) != B.at(j + r)) break;
                if (++r > cap) {
                    open = true;
                    break;
                }
            }
            if (open) continue;
            int w = tt.tail_of(A.at(i + r));
            int in_e = r > 0 ? (A.at(i + r - 1) ^ 1) : hin;
            int out_e = A.at(i + r), x = B.at(j + r);
            if (x == in_e) continue;
            if (left_start != left_of(tt, w, in_e, out_e, x)) return true;
        }
    }
    return false;
}

}  // namespace

bool is_edge_path(const TrainTrack& tt, const EdgePath& p) {
    check_ids(tt, p);
    size_t n = p.dedges.size();
    if (n == 0) return false;
    if (p.period < 0 || p.period > static_cast<int>(n)) return false;
    for (size_t i = 0; i + 1 < n; ++i)
        if (!smooth(tt, p.dedges[i], p.dedges[i + 1])) return false;
    if (p.period > 0 && !smooth(tt, p.dedges[n - 1], p.dedges[n - p.period])) return false;
    return true;
}

EdgePath reversed(const EdgePath& p) {
    EdgePath r;
    for (auto it = p.dedges.rbegin(); it != p.dedges.rend(); ++it) r.dedges.push_back(*it ^ 1);
    r.period = p.closed() ? p.period : 0;
    return r;
}

EdgePath canonical_cycle(const EdgePath& p) {
    EdgePath best = p;
    for (const EdgePath& q : {p, reversed(p)}) {
        for (size_t s = 0; s < q.dedges.size(); ++s) {
            EdgePath c;
            c.period = p.period;
            c.dedges.assign(q.dedges.begin() + s, q.dedges.end());
            c.dedges.insert(c.dedges.end(), q.dedges.begin(), q.dedges.begin() + s);
            if (c.dedges < best.dedges) best = c;
        }
    }
    return best;
}

bool paths_cross(const TrainTrack& tt, const EdgePath& a, const EdgePath& b) {
    check_ids(tt, a);
    check_ids(tt, b);
    Seq A = unroll(a), B = unroll(b), Br = unroll(reversed(b));
    if (!b.closed()) Br = {Br.d, false};
    return cross_oriented(tt, A, B, false) || cross_oriented(tt, A, Br, false);
}

bool self_crosses(const TrainTrack& tt, const EdgePath& a) {
    check_ids(tt, a);
    Seq A = unroll(a);
    Seq Ar = unroll(reversed(a));
    return cross_oriented(tt, A, A, true) || cross_oriented(tt, A, Ar, false);
}

StandardChoice carrying_choice(const PantsDecomposition& pd, const DehnThurston& dt) {
    validate_structure(pd);
    size_t G = pd.gluings.size();
    if (dt.m.size() != G || dt.t.size() != G) throw NotCarried("one (m, t) pair per gluing expected");
    std::vector<std::array<long long, 3>> m(pd.pants.size(), {0, 0, 0});
    std::vector<Tangency> tang;
    for (size_t g = 0; g < G; ++g) {
        if (dt.m[g] < 0) throw NotCarried("negative intersection number");
        if (dt.m[g] == 0 && dt.t[g] < 0) throw NotCarried("negative multiplicity of a cuff curve");
        m[pd.gluings[g].a.pants][pd.gluings[g].a.slot] = dt.m[g];
        m[pd.gluings[g].b.pants][pd.gluings[g].b.slot] = dt.m[g];
        tang.push_back(dt.m[g] > 0 && dt.t[g] > 0 ? Tangency::Right : Tangency::Left);
    }
    std::vector<TrackType> types;
    for (size_t p = 0; p < pd.pants.size(); ++p) {
        const auto& mp = m[p];
        if ((mp[0] + mp[1] + mp[2]) % 2 != 0)
            throw NotCarried("odd intersection total on pants " + std::to_string(pd.pants[p].id));
        const auto& pants = pd.pants[p];
        TrackType type = default_type(pants);
        if (pants.cusp_count() == 0) {
            for (int i = 0; i < 3; ++i)
                if (mp[i] > mp[(i + 1) % 3] + mp[(i + 2) % 3]) type = {i};
        } else if (pants.cusp_count() == 1) {
            int best = -1;
            for (int i = 0; i < 3; ++i)
                if (!pants.slots[i].cusp && (best < 0 || mp[i] > mp[best])) best = i;
            type = {best};
        }
        types.push_back(type);
    }
    return StandardChoice::make(pd, types, tang);
}

int signed_id(int dedge) { return (dedge & 1) ? -(dedge / 2 + 1) : dedge / 2 + 1; }

int dedge_from_signed(int id) { return id > 0 ? 2 * (id - 1) : 2 * (-id - 1) + 1; }

nlohmann::json to_json(const TrainTrack& tt) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (size_t v = 0; v < tt.vertices.size(); ++v) {
        const auto& tv = tt.vertices[v];
        nlohmann::json jv{{"id", v}, {"kind", tv.on_cuff ? "cuff" : "switch"}, {"pants", tt.pd.pants[tv.pants].id}};
        if (tv.on_cuff) jv["cuff"] = tv.cuff;
        nlohmann::json cyc = nlohmann::json::array();
        for (int h : tv.cyclic) cyc.push_back(signed_id(h));
        jv["cyclic"] = cyc;
        jv["sides"] = tv.side;
        if (!tv.punctures.empty()) jv["punctures"] = tv.punctures;
        j["vertices"].push_back(jv);
    }
    j["edges"] = nlohmann::json::array();
    for (size_t e = 0; e < tt.edges.size(); ++e) {
        const auto& te = tt.edges[e];
        nlohmann::json je{{"id", e + 1},
                          {"tail", te.tail},
                          {"head", te.head},
                          {"kind", te.cuff_edge ? "cuff" : "connector"},
                          {"pants", tt.pd.pants[te.pants].id},
                          {"name", te.name},
                          {"seams", te.seams}};
        if (te.cuff_edge) je["cuff"] = te.cuff;
        j["edges"].push_back(je);
    }
    nlohmann::json regs = nlohmann::json::array();
    for (const auto& r : regions(tt)) {
        nlohmann::json b = nlohmann::json::array();
        for (int d : r.boundary) b.push_back(signed_id(d));
        regs.push_back({{"kind", to_string(r.kind)}, {"cusps", r.cusps}, {"boundary", b}});
    }
    j["regions"] = regs;
    j["choice"] = to_json(tt.choice);
    return j;
}

nlohmann::json to_json(const TrainTrack&, const EdgePath& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (int d : p.dedges) arr.push_back(signed_id(d));
    nlohmann::json j{{"path", arr}};
    if (p.period > 0) j["period"] = p.period;
    return j;
}

EdgePath path_from_json(const TrainTrack& tt, const nlohmann::json& j) {
    EdgePath p;
    const nlohmann::json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("path")) throw ParseError("path: missing field");
        arr = &j["path"];
        if (j.contains("period")) {
            if (!j["period"].is_number_integer()) throw ParseError("period: expected an integer");
            p.period = j["period"].get<int>();
        }
    }
    if (!arr->is_array()) throw ParseError("path: expected an array of signed edge ids");
    for (size_t i = 0; i < arr->size(); ++i) {
        const auto& x = (*arr)[i];
        if (!x.is_number_integer() || x.get<int>() == 0)
            throw ParseError("path[" + std::to_string(i) + "]: expected a non-zero integer");
        int id = x.get<int>();
        if (std::abs(id) > static_cast<int>(tt.edges.size())) throw UnknownEdge("edge " + std::to_string(id));
        p.dedges.push_back(dedge_from_signed(id));
    }
    if (p.period < 0 || p.period > static_cast<int>(p.dedges.size()))
        throw ParseError("period: out of range");
    return p;
}

nlohmann::json to_json(const StandardChoice& c) {
    nlohmann::json types = nlohmann::json::array(), tang = nlohmann::json::array();
    for (const auto& t : c.types) types.push_back(t.self_slot);
    for (const auto& ts : c.tangency) {
        nlohmann::json row = nlohmann::json::array();
        for (auto x : ts) row.push_back(x == Tangency::Left ? "left" : "right");
        tang.push_back(row);
    }
    return {{"types", types}, {"tangency", tang}};
}

StandardChoice choice_from_json(const PantsDecomposition& pd, const nlohmann::json& j) {
    StandardChoice c = StandardChoice::defaults(pd);
    if (!j.is_object()) throw ParseError("choice: expected an object");
    if (j.contains("types")) {
        const auto& t = j["types"];
        if (!t.is_array() || t.size() != pd.pants.size())
            throw ParseError("choice.types: expected one entry per pants");
        for (size_t p = 0; p < t.size(); ++p) {
            if (!t[p].is_number_integer() || t[p].get<int>() < -1 || t[p].get<int>() > 2)
                throw ParseError("choice.types[" + std::to_string(p) + "]: expected -1, 0, 1 or 2");
            c.types[p] = {t[p].get<int>()};
        }
    }
    if (j.contains("tangency")) {
        const auto& t = j["tangency"];
        if (!t.is_array() || t.size() != pd.pants.size())
            throw ParseError("choice.tangency: expected one row per pants");
        for (size_t p = 0; p < t.size(); ++p) {
            if (!t[p].is_array() || t[p].size() != 3)
                throw ParseError("choice.tangency[" + std::to_string(p) + "]: expected three entries");
            for (int s = 0; s < 3; ++s) {
                const auto& x = t[p][s];
                if (x == "left")
                    c.tangency[p][s] = Tangency::Left;
                else if (x == "right")
                    c.tangency[p][s] = Tangency::Right;
                else
                    throw ParseError("choice.tangency[" + std::to_string(p) + "][" + std::to_string(s) +
                                     "]: expected \"left\" or \"right\"");
            }
        }
    }
    return c;
}

}  // namespace lamtrack
