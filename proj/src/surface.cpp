#include "lamtrack/surface.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>

#include "lamtrack/errors.hpp"
#include "lamtrack/tolerance.hpp"

namespace lamtrack {

namespace {

constexpr double kQuarter = std::numbers::pi / 2;

Mat2 turn() { return rotation(kQuarter); }

// Frame through two ideal points, facing from u to v.
Mat2 frame_between(IdealPoint u, IdealPoint v) {
    double pu = -u.theta / 2, pv = -v.theta / 2;
    double u1 = std::cos(pu), u2 = std::sin(pu);
    double v1 = std::cos(pv), v2 = std::sin(pv);
    // columns: v (image of infinity), u (image of 0)
    Mat2 g{v1, u1, v2, u2};
    if (g.det() < 0) g = {-v1, u1, -v2, u2};
    double s = 1.0 / std::sqrt(g.det());
    return {g.a * s, g.b * s, g.c * s, g.d * s};
}

// Pants of least eccentricity in the gluing graph; 0 if the graph is disconnected.
int central_pants(const PantsDecomposition& pd) {
    int n = static_cast<int>(pd.pants.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& g : pd.gluings) {
        adj[g.a.pants].push_back(g.b.pants);
        adj[g.b.pants].push_back(g.a.pants);
    }
    int best = 0, best_ecc = n + 1;
    for (int r = 0; r < n; ++r) {
        std::vector<int> dist(n, -1);
        std::deque<int> queue{r};
        dist[r] = 0;
        int ecc = 0, reached = 1;
        while (!queue.empty()) {
            int p = queue.front();
            queue.pop_front();
            ecc = std::max(ecc, dist[p]);
            for (int q : adj[p])
                if (dist[q] < 0) {
                    dist[q] = dist[p] + 1;
                    ++reached;
                    queue.push_back(q);
                }
        }
        if (reached < n) return 0;
        if (ecc < best_ecc) {
            best_ecc = ecc;
            best = r;
        }
    }
    return best;
}

}  // namespace

int PairOfPants::cusp_count() const {
    int n = 0;
    for (const auto& s : slots) n += s.cusp ? 1 : 0;
    return n;
}

int PantsDecomposition::index_of(int pants_id) const {
    for (size_t i = 0; i < pants.size(); ++i)
        if (pants[i].id == pants_id) return static_cast<int>(i);
    return -1;
}

std::vector<Cuff> PantsDecomposition::cuffs() const {
    std::vector<Cuff> out;
    std::vector<std::array<bool, 3>> used(pants.size(), {false, false, false});
    for (size_t g = 0; g < gluings.size(); ++g) {
        const Gluing& gl = gluings[g];
        Cuff c;
        c.side_a = gl.a;
        c.side_b = gl.b;
        c.length = pants[gl.a.pants].slots[gl.a.slot].length;
        c.twist = gl.twist;
        c.gluing = static_cast<int>(g);
        out.push_back(c);
        used[gl.a.pants][gl.a.slot] = true;
        used[gl.b.pants][gl.b.slot] = true;
    }
    for (size_t p = 0; p < pants.size(); ++p)
        for (int s = 0; s < 3; ++s)
            if (!pants[p].slots[s].cusp && !used[p][s]) {
                Cuff c;
                c.side_a = {static_cast<int>(p), s};
                c.length = pants[p].slots[s].length;
                out.push_back(c);
            }
    return out;
}

std::vector<std::array<int, 3>> PantsDecomposition::cuff_index() const {
    std::vector<std::array<int, 3>> idx(pants.size(), {-1, -1, -1});
    auto cs = cuffs();
    for (size_t k = 0; k < cs.size(); ++k) {
        idx[cs[k].side_a.pants][cs[k].side_a.slot] = static_cast<int>(k);
        if (cs[k].side_b) idx[cs[k].side_b->pants][cs[k].side_b->slot] = static_cast<int>(k);
    }
    return idx;
}

void validate_structure(const PantsDecomposition& pd) {
    std::map<int, int> ids;
    for (size_t i = 0; i < pd.pants.size(); ++i) {
        const auto& p = pd.pants[i];
        if (!ids.emplace(p.id, static_cast<int>(i)).second)
            throw InvalidPants("duplicate pants id " + std::to_string(p.id));
        if (p.cusp_count() > 2) throw InvalidPants("pants " + std::to_string(p.id) + " has three cusps");
        for (const auto& s : p.slots)
            if (!s.cusp && !(s.length > 0) )
                throw InvalidPants("pants " + std::to_string(p.id) + " has a non-positive cuff length");
    }
    std::vector<std::array<bool, 3>> used(pd.pants.size(), {false, false, false});
    auto check = [&](const SlotRef& r) {
        if (r.pants < 0 || r.pants >= static_cast<int>(pd.pants.size()) || r.slot < 0 || r.slot > 2)
            throw InvalidGluing("slot reference out of range");
        if (pd.pants[r.pants].slots[r.slot].cusp) throw InvalidGluing("cannot glue a cusp");
        if (used[r.pants][r.slot]) throw InvalidGluing("slot glued twice");
        used[r.pants][r.slot] = true;
    };
    for (const auto& g : pd.gluings) {
        check(g.a);
        check(g.b);
        if (pd.pants[g.a.pants].slots[g.a.slot].length != pd.pants[g.b.pants].slots[g.b.slot].length)
            throw InvalidGluing("cuff lengths differ across a gluing");
        if (!std::isfinite(g.twist)) throw InvalidGluing("twist is not finite");
    }
}

std::optional<ExampleKind> parse_example_kind(const std::string& s) {
    if (s == "flute") return ExampleKind::Flute;
    if (s == "ladder") return ExampleKind::Ladder;
    if (s == "tree") return ExampleKind::Tree;
    return std::nullopt;
}

PantsDecomposition build_example(ExampleKind kind, int depth, Length cuff_len, double twist) {
    if (depth < 1) throw DomainError("depth must be >= 1");
    if (!(cuff_len > 0)) throw DomainError("cuff length must be > 0");
    PantsDecomposition pd;
    auto add = [&](std::array<Slot, 3> slots) {
        int id = static_cast<int>(pd.pants.size());
        pd.pants.push_back({id, slots});
        return id;
    };
    Slot c = Slot::cuff(cuff_len);
    switch (kind) {
        case ExampleKind::Flute: {
            for (int i = 0; i < depth; ++i) add({c, c, Slot::make_cusp()});
            for (int i = 0; i + 1 < depth; ++i) pd.gluings.push_back({{i, 1}, {i + 1, 0}, twist});
            break;
        }
        case ExampleKind::Ladder: {
            for (int i = 0; i < depth; ++i) {
                add({c, c, c});
                add({c, c, c});
            }
            for (int i = 0; i < depth; ++i) {
                int top = 2 * i, bottom = 2 * i + 1;
                pd.gluings.push_back({{top, 2}, {bottom, 2}, twist});
                if (i + 1 < depth) {
                    pd.gluings.push_back({{top, 1}, {top + 2, 0}, twist});
                    pd.gluings.push_back({{bottom, 1}, {bottom + 2, 0}, twist});
                }
            }
            break;
        }
        case ExampleKind::Tree: {
            std::vector<int> frontier{add({c, c, c})};
            for (int level = 1; level < depth; ++level) {
                std::vector<int> next;
                for (int parent : frontier) {
                    int first = parent == 0 ? 0 : 1;
                    for (int s = first; s < 3; ++s) {
                        int child = add({c, c, c});
                        pd.gluings.push_back({{parent, s}, {child, 0}, twist});
                        next.push_back(child);
                    }
                }
                frontier = std::move(next);
            }
            break;
        }
    }
    return pd;
}

bool validate_bounded(const PantsDecomposition& pd, double M) {
    BoundM bound(M);
    for (const auto& p : pd.pants)
        for (const auto& s : p.slots)
            if (!s.cusp && !bound.admits(s.length)) return false;
    return true;
}

PantsModel pants_model(const PairOfPants& p) {
    PantsModel m;
    for (int i = 0; i < 3; ++i) {
        m.cusp[i] = p.slots[i].cusp;
        m.half[i] = m.cusp[i] ? 0.0 : p.slots[i].length / 2;
    }
    int cusps = p.cusp_count();
    std::array<Mat2, 3> seam_frame;
    if (cusps == 0) {
        Mat2 f;
        for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3, k = (i + 2) % 3;
            m.midpoint_frame[i] = f * translation(m.half[i] / 2);
            seam_frame[i] = f * translation(m.half[i]) * turn();
            m.seam_length[i] = hexagon_orthogeodesic(m.half[i], m.half[j], m.half[k]);
            f = seam_frame[i] * translation(m.seam_length[i]) * turn();
        }
    } else if (cusps == 1) {
        int c = m.cusp[0] ? 0 : (m.cusp[1] ? 1 : 2);
        int i = (c + 1) % 3, j = (c + 2) % 3;
        Mat2 f;
        m.midpoint_frame[i] = f * translation(m.half[i] / 2);
        seam_frame[c] = f * turn();
        seam_frame[i] = f * translation(m.half[i]) * turn();
        m.seam_length[i] = hexagon_orthogeodesic(m.half[i], m.half[j], 0.0);
        m.seam_length[j] = m.seam_length[c] = INFINITY;
        f = seam_frame[i] * translation(m.seam_length[i]) * turn();
        m.midpoint_frame[j] = f * translation(m.half[j] / 2);
        seam_frame[j] = f * translation(m.half[j]) * turn();
    } else {
        int i = !m.cusp[0] ? 0 : (!m.cusp[1] ? 1 : 2);
        int j = (i + 1) % 3, k = (i + 2) % 3;
        Mat2 f;
        m.midpoint_frame[i] = f * translation(m.half[i] / 2);
        seam_frame[k] = f * turn();
        seam_frame[i] = f * translation(m.half[i]) * turn();
        IdealPoint to_j = apply(seam_frame[i], IdealPoint::infinity());
        IdealPoint to_k = apply(seam_frame[k], IdealPoint::infinity());
        seam_frame[j] = frame_between(to_j, to_k);
        m.seam_length = {INFINITY, INFINITY, INFINITY};
    }
    for (int i = 0; i < 3; ++i) m.seam_reflection[i] = reflection_in(seam_frame[i]);
    for (int i = 0; i < 3; ++i) m.boundary[i] = m.seam_reflection[i] * m.seam_reflection[(i + 2) % 3];
    int ref = !m.cusp[0] ? 0 : (!m.cusp[1] ? 1 : 2);
    m.interior = frame_point(m.midpoint_frame[ref] * turn() * translation(0.2));
    return m;
}

Mat2 gluing_transition(const PantsModel& a, int slot_a, const PantsModel& b, int slot_b, double twist) {
    return a.midpoint_frame[slot_a] * translation(-twist) * rotation(std::numbers::pi) *
           b.midpoint_frame[slot_b].inverse();
}

Holonomy holonomy(const PantsDecomposition& pd) {
    validate_structure(pd);
    size_t n = pd.pants.size();
    if (n == 0) throw DisconnectedError("empty decomposition");
    std::vector<PantsModel> models;
    for (const auto& p : pd.pants) models.push_back(pants_model(p));
    Holonomy h;
    h.root = central_pants(pd);
    h.placement.assign(n, Mat2{});
    std::vector<bool> seen(n, false);
    std::vector<bool> tree(pd.gluings.size(), false);
    std::deque<int> queue{h.root};
    seen[h.root] = true;
    while (!queue.empty()) {
        int p = queue.front();
        queue.pop_front();
        for (size_t g = 0; g < pd.gluings.size(); ++g) {
            const Gluing& gl = pd.gluings[g];
            int other = -1;
            Mat2 step;
            if (gl.a.pants == p && !seen[gl.b.pants]) {
                other = gl.b.pants;
                step = gluing_transition(models[p], gl.a.slot, models[other], gl.b.slot, gl.twist);
            } else if (gl.b.pants == p && !seen[gl.a.pants]) {
                other = gl.a.pants;
                step = gluing_transition(models[other], gl.a.slot, models[p], gl.b.slot, gl.twist).inverse();
            }
            if (other < 0) continue;
            seen[other] = true;
            tree[g] = true;
            h.placement[other] = h.placement[p] * step;
            queue.push_back(other);
        }
    }
    for (size_t p = 0; p < n; ++p)
        if (!seen[p]) throw DisconnectedError("pants " + std::to_string(pd.pants[p].id) + " is unreachable");
    h.boundary.resize(n);
    for (size_t p = 0; p < n; ++p)
        for (int s = 0; s < 3; ++s)
            h.boundary[p][s] = h.placement[p] * models[p].boundary[s] * h.placement[p].inverse();
    for (const auto& c : pd.cuffs()) h.cuff.push_back(h.boundary[c.side_a.pants][c.side_a.slot]);
    for (size_t g = 0; g < pd.gluings.size(); ++g) {
        if (tree[g]) {
            h.tree_gluings.push_back(static_cast<int>(g));
            continue;
        }
        const Gluing& gl = pd.gluings[g];
        Mat2 step = gluing_transition(models[gl.a.pants], gl.a.slot, models[gl.b.pants], gl.b.slot, gl.twist);
        h.loops.push_back(h.placement[gl.a.pants] * step * h.placement[gl.b.pants].inverse());
    }
    return h;
}

std::vector<TrackType> valid_types(const PairOfPants& p) {
    std::vector<TrackType> out;
    if (p.cusp_count() == 0) out.push_back({-1});
    for (int s = 0; s < 3; ++s)
        if (!p.slots[s].cusp) out.push_back({s});
    return out;
}

TrackType default_type(const PairOfPants& p) { return valid_types(p).front(); }

PantsSkeleton pants_skeleton(const PairOfPants& p, TrackType type) {
    auto types = valid_types(p);
    if (std::find(types.begin(), types.end(), type) == types.end())
        throw InvalidPants("track type not available for this pants");
    PantsModel m = pants_model(p);
    PantsSkeleton sk;
    sk.type = type;
    const auto& l = m.half;
    int cusps = p.cusp_count();
    if (type.theta()) {
        for (int i = 0; i < 3; ++i) {
            sk.arcs.push_back({i, (i + 1) % 3, m.seam_length[i]});
            sk.subarcs[i] = {l[i], l[i]};
        }
        return sk;
    }
    int i = type.self_slot, j = (i + 1) % 3, k = (i + 2) % 3;
    auto seam = [&](int a, int b) { return (b == (a + 1) % 3) ? m.seam_length[a] : m.seam_length[b]; };
    if (cusps == 0) {
        Length dij = seam(i, j), dik = seam(i, k);
        Length aj = pentagon_solve(l[j], dij);
        Length ak = pentagon_solve(l[k], dik);
        Length self = 2 * std::acosh(std::sinh(dij) * std::sinh(l[j]));
        sk.arcs = {{i, i, self}, {i, j, dij}, {i, k, dik}};
        sk.subarcs[i] = {aj, ak, ak, aj};
        sk.subarcs[j] = {2 * l[j]};
        sk.subarcs[k] = {2 * l[k]};
    } else if (cusps == 1) {
        int o = m.cusp[j] ? k : j;
        Length dio = seam(i, o);
        Length a = pentagon_solve(l[o], dio);
        Length self = 2 * std::acosh(std::sinh(dio) * std::sinh(l[o]));
        sk.arcs = {{i, i, self}, {i, o, dio}};
        sk.subarcs[i] = {a, 2 * (l[i] - a), a};
        sk.subarcs[o] = {2 * l[o]};
    } else {
        Length self = 2 * lambert_ideal_side(l[i] / 2);
        sk.arcs = {{i, i, self}};
        sk.subarcs[i] = {l[i], l[i]};
    }
    return sk;
}

Skeleton skeleton(const PantsDecomposition& pd, const std::vector<TrackType>& types) {
    validate_structure(pd);
    Skeleton sk;
    for (size_t p = 0; p < pd.pants.size(); ++p) {
        TrackType t = types.empty() ? default_type(pd.pants[p]) : types.at(p);
        sk.pants.push_back(pants_skeleton(pd.pants[p], t));
    }
    double M1 = 1;
    auto bump = [&](double x) {
        if (x > 0 && std::isfinite(x)) M1 = std::max({M1, x, 1.0 / x});
    };
    for (const auto& ps : sk.pants) {
        for (const auto& a : ps.arcs) bump(a.length);
        for (const auto& sub : ps.subarcs)
            for (double x : sub) bump(x);
    }
    sk.M1 = M1;
    return sk;
}

nlohmann::json to_json(const PantsDecomposition& pd) {
    nlohmann::json j;
    j["pants"] = nlohmann::json::array();
    for (const auto& p : pd.pants) {
        nlohmann::json slots = nlohmann::json::array();
        for (const auto& s : p.slots) {
            if (s.cusp)
                slots.push_back("cusp");
            else
                slots.push_back({{"cuff", s.length}});
        }
        j["pants"].push_back({{"id", p.id}, {"slots", slots}});
    }
    j["gluings"] = nlohmann::json::array();
    for (const auto& g : pd.gluings) {
        j["gluings"].push_back({{"a", {pd.pants[g.a.pants].id, g.a.slot}},
                                {"b", {pd.pants[g.b.pants].id, g.b.slot}},
                                {"twist", g.twist}});
    }
    return j;
}

PantsDecomposition surface_from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& where, const std::string& what) {
        throw ParseError(where + ": " + what);
    };
    if (!j.is_object()) fail("$", "expected an object");
    if (!j.contains("pants") || !j["pants"].is_array()) fail("$.pants", "expected an array");
    PantsDecomposition pd;
    for (size_t i = 0; i < j["pants"].size(); ++i) {
        const auto& jp = j["pants"][i];
        std::string where = "$.pants[" + std::to_string(i) + "]";
        if (!jp.is_object()) fail(where, "expected an object");
        if (!jp.contains("id") || !jp["id"].is_number_integer()) fail(where + ".id", "expected an integer");
        if (!jp.contains("slots") || !jp["slots"].is_array() || jp["slots"].size() != 3)
            fail(where + ".slots", "expected an array of three slots");
        PairOfPants p;
        p.id = jp["id"].get<int>();
        for (int s = 0; s < 3; ++s) {
            const auto& js = jp["slots"][s];
            std::string sw = where + ".slots[" + std::to_string(s) + "]";
            if (js.is_string() && js.get<std::string>() == "cusp") {
                p.slots[s] = Slot::make_cusp();
            } else if (js.is_object() && js.contains("cuff") && js["cuff"].is_number()) {
                p.slots[s] = Slot::cuff(js["cuff"].get<double>());
            } else {
                fail(sw, "expected {\"cuff\": length} or \"cusp\"");
            }
        }
        pd.pants.push_back(p);
    }
    if (j.contains("gluings")) {
        if (!j["gluings"].is_array()) fail("$.gluings", "expected an array");
        for (size_t g = 0; g < j["gluings"].size(); ++g) {
            const auto& jg = j["gluings"][g];
            std::string where = "$.gluings[" + std::to_string(g) + "]";
            if (!jg.is_object()) fail(where, "expected an object");
            auto ref = [&](const char* key) {
                if (!jg.contains(key) || !jg[key].is_array() || jg[key].size() != 2 ||
                    !jg[key][0].is_number_integer() || !jg[key][1].is_number_integer())
                    fail(where + "." + key, "expected [pants_id, slot]");
                int idx = pd.index_of(jg[key][0].get<int>());
                if (idx < 0) fail(where + "." + key, "unknown pants id");
                return SlotRef{idx, jg[key][1].get<int>()};
            };
            Gluing gl;
            gl.a = ref("a");
            gl.b = ref("b");
            if (jg.contains("twist")) {
                if (!jg["twist"].is_number()) fail(where + ".twist", "expected a number");
                gl.twist = jg["twist"].get<double>();
            }
            pd.gluings.push_back(gl);
        }
    }
    return pd;
}

}  // namespace lamtrack
