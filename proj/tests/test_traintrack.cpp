#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "lamtrack/cover.hpp"
#include "lamtrack/errors.hpp"
#include "lamtrack/traintrack.hpp"

using namespace lamtrack;

namespace {

const double kLen = 2 * std::acosh(2.0);

struct Census {
    int triangles = 0, monogons = 0, boundary = 0;
    size_t vertices = 0, edges = 0;
    bool operator==(const Census&) const = default;
};

Census census(const TrainTrack& tt) {
    Census c;
    c.vertices = tt.vertices.size();
    c.edges = tt.edges.size();
    for (const auto& r : regions(tt)) {
        if (r.kind == RegionKind::Triangle) ++c.triangles;
        if (r.kind == RegionKind::PuncturedMonogon) ++c.monogons;
        if (r.kind == RegionKind::Boundary) ++c.boundary;
    }
    return c;
}

TrainTrack single_track(std::array<Slot, 3> slots, TrackType type) {
    PantsDecomposition pd;
    pd.pants.push_back({0, slots});
    return build_track(pd, StandardChoice::make(pd, {type}, {}));
}

// Smooth continuations of a directed edge, read straight off the vertex tables.
std::vector<int> successors(const TrainTrack& tt, int d) {
    int in = d ^ 1;
    int v = tt.half_vertex(in);
    const auto& vx = tt.vertices[v];
    int in_side = -1;
    for (size_t k = 0; k < vx.cyclic.size(); ++k)
        if (vx.cyclic[k] == in) in_side = vx.side[k];
    std::vector<int> out;
    for (size_t k = 0; k < vx.cyclic.size(); ++k)
        if (vx.side[k] != in_side) out.push_back(vx.cyclic[k]);
    return out;
}

// Closed smooth paths of length <= max_len, one per rotation/reversal class.
std::vector<EdgePath> closed_paths(const TrainTrack& tt, int max_len) {
    std::set<std::vector<int>> seen;
    std::vector<EdgePath> out;
    std::vector<int> cur;
    std::function<void()> dfs = [&]() {
        int n = static_cast<int>(cur.size());
        if (n > 0) {
            auto next = successors(tt, cur.back());
            if (std::find(next.begin(), next.end(), cur.front()) != next.end()) {
                EdgePath p{cur, n};
                // primitive only
                bool primitive = true;
                for (int k = 1; k < n && primitive; ++k)
                    if (n % k == 0 && std::equal(cur.begin(), cur.end() - k, cur.begin() + k)) primitive = false;
                if (primitive) {
                    auto c = canonical_cycle(p);
                    if (seen.insert(c.dedges).second) out.push_back(c);
                }
            }
        }
        if (n == max_len) return;
        std::vector<int> next;
        if (n == 0) {
            for (int d = 0; d < 2 * static_cast<int>(tt.edges.size()); ++d) next.push_back(d);
        } else {
            next = successors(tt, cur.back());
        }
        for (int d : next) {
            cur.push_back(d);
            dfs();
            cur.pop_back();
        }
    };
    dfs();
    return out;
}

PantsDecomposition genus_two() {
    PantsDecomposition pd;
    for (int i = 0; i < 2; ++i) pd.pants.push_back({i, {Slot::cuff(kLen), Slot::cuff(kLen), Slot::cuff(kLen)}});
    for (int s = 0; s < 3; ++s) pd.gluings.push_back({{0, s}, {1, s}, 0});
    return pd;
}

}  // namespace

TEST(Regions, ThreeCuffTypes) {
    std::array<Slot, 3> s{Slot::cuff(kLen), Slot::cuff(kLen), Slot::cuff(kLen)};
    EXPECT_EQ(census(single_track(s, {-1})), (Census{2, 0, 3, 6, 9}));
    for (int i = 0; i < 3; ++i) EXPECT_EQ(census(single_track(s, {i})), (Census{2, 0, 3, 5, 8}));
}

TEST(Regions, FourTypesAreDistinct) {
    std::array<Slot, 3> s{Slot::cuff(kLen), Slot::cuff(kLen), Slot::cuff(kLen)};
    std::set<std::multiset<int>> shapes;
    for (int t = -1; t < 3; ++t) {
        auto tt = single_track(s, {t});
        std::multiset<int> roles;
        for (const auto& e : tt.edges) roles.insert(static_cast<int>(e.role) * 10 + std::max(e.slot, 0));
        shapes.insert(roles);
    }
    EXPECT_EQ(shapes.size(), 4u);
}

TEST(Regions, OneCuspTypes) {
    std::array<Slot, 3> s{Slot::cuff(kLen), Slot::cuff(kLen), Slot::make_cusp()};
    EXPECT_EQ(census(single_track(s, {0})), (Census{1, 1, 2, 4, 6}));
    EXPECT_EQ(census(single_track(s, {1})), (Census{1, 1, 2, 3, 5}));
}

TEST(Regions, TwoCuspType) {
    std::array<Slot, 3> s{Slot::cuff(kLen), Slot::make_cusp(), Slot::make_cusp()};
    auto tt = single_track(s, {0});
    EXPECT_EQ(census(tt), (Census{0, 2, 1, 2, 3}));
    int cuff_edges = 0;
    for (const auto& e : tt.edges) cuff_edges += e.cuff_edge ? 1 : 0;
    EXPECT_EQ(cuff_edges, 1);
}

TEST(Regions, FluteHasOnePuncturedMonogonPerCusp) {
    auto pd = build_example(ExampleKind::Flute, 3, kLen, 0);
    auto c = census(build_track(pd, StandardChoice::defaults(pd)));
    EXPECT_EQ(c.monogons, 3);
}

TEST(Regions, IndexSumIsEulerCharacteristic) {
    // a triangle has index 1 - 3/2, a punctured monogon 0 - 1/2, a boundary annulus 0
    std::mt19937_64 rng(9);
    for (auto kind : {ExampleKind::Flute, ExampleKind::Ladder, ExampleKind::Tree}) {
        for (int depth = 1; depth <= 3; ++depth) {
            auto pd = build_example(kind, depth, kLen, 0.1);
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<TrackType> types;
                for (const auto& p : pd.pants) {
                    auto ok = valid_types(p);
                    types.push_back(ok[rng() % ok.size()]);
                }
                std::vector<Tangency> tang;
                for (size_t c = 0; c < pd.cuffs().size(); ++c) tang.push_back(rng() % 2 ? Tangency::Left : Tangency::Right);
                auto tt = build_track(pd, StandardChoice::make(pd, types, tang));
                auto rs = regions(tt);
                double index = 0;
                int punctures = 0;
                for (const auto& r : rs) {
                    ASSERT_TRUE(r.kind == RegionKind::Triangle || r.kind == RegionKind::PuncturedMonogon ||
                                r.kind == RegionKind::Boundary);
                    if (r.kind == RegionKind::Triangle) index += 1 - 1.5;
                    if (r.kind == RegionKind::PuncturedMonogon) index += -0.5, ++punctures;
                }
                EXPECT_DOUBLE_EQ(index, -static_cast<double>(pd.pants.size()));
                int cusps = 0;
                for (const auto& p : pd.pants) cusps += p.cusp_count();
                EXPECT_EQ(punctures, cusps);
            }
        }
    }
}

TEST(Regions, GenusTwoDoubledPants) {
    auto pd = genus_two();
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    auto c = census(tt);
    EXPECT_EQ(c.boundary, 0);
    EXPECT_EQ(c.monogons, 0);
    EXPECT_EQ(static_cast<long>(c.vertices) - static_cast<long>(c.edges) + c.triangles, -2);
}

TEST(BuildTrack, TangencyMismatch) {
    auto pd = build_example(ExampleKind::Tree, 2, kLen, 0);
    auto choice = StandardChoice::defaults(pd);
    choice.tangency[1][0] = Tangency::Right;
    EXPECT_THROW(build_track(pd, choice), TangencyMismatch);
}

TEST(BuildTrack, CuffEdgesAreLoopsAtBasepoints) {
    auto pd = build_example(ExampleKind::Ladder, 2, kLen, 0);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    ASSERT_EQ(tt.cuff_edge.size(), pd.cuffs().size());
    for (size_t c = 0; c < tt.cuff_edge.size(); ++c) {
        const auto& e = tt.edges[tt.cuff_edge[c]];
        EXPECT_TRUE(e.cuff_edge);
        EXPECT_EQ(e.tail, tt.cuff_vertex[c]);
        EXPECT_EQ(e.head, tt.cuff_vertex[c]);
    }
    for (const auto& v : tt.vertices) {
        std::set<int> sides(v.side.begin(), v.side.end());
        EXPECT_EQ(sides.size(), 2u);
    }
}

TEST(EdgePaths, CuffCycleIsSmooth) {
    auto pd = build_example(ExampleKind::Ladder, 2, kLen, 0);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    for (int e : tt.cuff_edge) {
        EXPECT_TRUE(is_edge_path(tt, {{forward(e), forward(e)}, 2}));
        EXPECT_TRUE(is_edge_path(tt, {{backward(e)}, 1}));
        EXPECT_FALSE(is_edge_path(tt, {{forward(e), backward(e)}, 0}));
    }
}

TEST(EdgePaths, SameSideConnectorsRejected) {
    std::array<Slot, 3> s{Slot::cuff(kLen), Slot::cuff(kLen), Slot::cuff(kLen)};
    auto tt = single_track(s, {-1});
    // at a theta switch the two branches leave on the same side
    for (const auto& v : tt.vertices) {
        if (v.on_cuff) continue;
        int a = -1, b = -1;
        for (size_t k = 0; k < v.cyclic.size(); ++k)
            for (size_t l = k + 1; l < v.cyclic.size(); ++l)
                if (v.side[k] == v.side[l]) a = v.cyclic[k], b = v.cyclic[l];
        ASSERT_GE(a, 0);
        EXPECT_FALSE(is_edge_path(tt, {{a ^ 1, b}, 0}));
    }
}

TEST(EdgePaths, CuffConnectorCuff) {
    auto pd = build_example(ExampleKind::Tree, 2, kLen, 0);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    int found = 0;
    for (int c = 0; c < static_cast<int>(tt.cuffs.size()); ++c) {
        for (int d0 : {forward(tt.cuff_edge[c]), backward(tt.cuff_edge[c])}) {
            for (int d1 : successors(tt, d0)) {
                if (tt.edges[edge_of(d1)].cuff_edge) continue;
                std::vector<int> path{d0, d1};
                while (!tt.vertices[tt.head_of(path.back())].on_cuff) path.push_back(successors(tt, path.back())[0]);
                for (int d2 : successors(tt, path.back())) {
                    if (!tt.edges[edge_of(d2)].cuff_edge) continue;
                    auto full = path;
                    full.push_back(d2);
                    EXPECT_TRUE(is_edge_path(tt, {full, 0}));
                    ++found;
                }
            }
        }
    }
    EXPECT_GT(found, 0);
}

TEST(EdgePaths, UnknownEdge) {
    auto pd = build_example(ExampleKind::Tree, 1, kLen, 0);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    EXPECT_THROW(is_edge_path(tt, {{999}, 0}), UnknownEdge);
    EXPECT_THROW(is_edge_path(tt, {{-1}, 0}), UnknownEdge);
}

TEST(PathsCross, DistinctCuffCyclesDoNotCross) {
    auto pd = build_example(ExampleKind::Ladder, 2, kLen, 0);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    for (size_t a = 0; a < tt.cuff_edge.size(); ++a) {
        EdgePath pa{{forward(tt.cuff_edge[a])}, 1};
        EXPECT_FALSE(self_crosses(tt, pa));
        for (size_t b = a + 1; b < tt.cuff_edge.size(); ++b)
            EXPECT_FALSE(paths_cross(tt, pa, {{forward(tt.cuff_edge[b])}, 1}));
    }
}

TEST(PathsCross, TransverseCurveCrossesCuff) {
    // a closed path that enters cuff 0 from one pants and leaves into the other must cross its cuff cycle
    auto pd = genus_two();
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    int v = tt.cuff_vertex[0];
    EdgePath cuff{{forward(tt.cuff_edge[0])}, 1};
    int transverse = 0, parallel = 0;
    for (const auto& p : closed_paths(tt, 10)) {
        bool uses_cuff = false;
        int through = 0, across = 0;
        for (size_t i = 0; i < p.dedges.size(); ++i) {
            int d = p.dedges[i], next = p.dedges[(i + 1) % p.dedges.size()];
            if (edge_of(d) == tt.cuff_edge[0]) uses_cuff = true;
            if (tt.head_of(d) != v) continue;
            ++through;
            int pin = tt.edges[edge_of(d)].pants, pout = tt.edges[edge_of(next)].pants;
            if (!tt.edges[edge_of(d)].cuff_edge && !tt.edges[edge_of(next)].cuff_edge && pin != pout) ++across;
        }
        if (uses_cuff || through == 0) continue;
        if (across > 0) {
            EXPECT_TRUE(paths_cross(tt, cuff, p));
            EXPECT_TRUE(paths_cross(tt, p, cuff));
            ++transverse;
        } else {
            EXPECT_FALSE(paths_cross(tt, cuff, p));
            ++parallel;
        }
    }
    EXPECT_GT(transverse, 0);
}

TEST(PathsCross, SymmetricAndInvariant) {
    auto pd = genus_two();
    auto tt = build_track(pd, StandardChoice::make(pd, {TrackType{-1}, TrackType{0}}, {}));
    auto paths = closed_paths(tt, 8);
    ASSERT_GT(paths.size(), 5u);
    int crossing = 0;
    for (size_t a = 0; a < paths.size(); ++a) {
        for (size_t b = a + 1; b < paths.size(); ++b) {
            bool x = paths_cross(tt, paths[a], paths[b]);
            EXPECT_EQ(x, paths_cross(tt, paths[b], paths[a]));
            EXPECT_EQ(x, paths_cross(tt, reversed(paths[a]), paths[b]));
            crossing += x ? 1 : 0;
        }
    }
    EXPECT_GT(crossing, 0);
}

TEST(PathsCross, CuffAndLoopCyclesAreSimple) {
    std::array<Slot, 3> s{Slot::cuff(kLen), Slot::cuff(kLen), Slot::cuff(kLen)};
    for (int t = -1; t < 3; ++t) {
        auto tt = single_track(s, {t});
        for (const auto& p : closed_paths(tt, 6)) {
            bool connector_only = true;
            for (int d : p.dedges) connector_only &= !tt.edges[edge_of(d)].cuff_edge;
            bool cuff_only = p.dedges.size() == 1 && tt.edges[edge_of(p.dedges[0])].cuff_edge;
            if (connector_only || cuff_only) EXPECT_FALSE(self_crosses(tt, p));
        }
    }
}

TEST(CarryingChoice, CuffCurveUsesDefaults) {
    auto pd = build_example(ExampleKind::Tree, 2, kLen, 0);
    auto c = carrying_choice(pd, {{0, 0, 0}, {1, 0, 0}});
    auto d = StandardChoice::defaults(pd);
    EXPECT_EQ(c.types, d.types);
    EXPECT_EQ(c.tangency, d.tangency);
}

TEST(CarryingChoice, PositiveTwistIsRight) {
    auto pd = build_example(ExampleKind::Tree, 2, kLen, 0);
    auto c = carrying_choice(pd, {{2, 2, 0}, {3, -1, 0}});
    const auto& g0 = pd.gluings[0];
    EXPECT_EQ(c.tangency[g0.a.pants][g0.a.slot], Tangency::Right);
    EXPECT_EQ(c.tangency[g0.b.pants][g0.b.slot], Tangency::Right);
    const auto& g1 = pd.gluings[1];
    EXPECT_EQ(c.tangency[g1.a.pants][g1.a.slot], Tangency::Left);
    const auto& g2 = pd.gluings[2];
    EXPECT_EQ(c.tangency[g2.a.pants][g2.a.slot], Tangency::Left);
}

TEST(CarryingChoice, SelfArcTypeForTwoZeroZero) {
    auto pd = genus_two();
    auto c = carrying_choice(pd, {{2, 0, 0}, {0, 0, 0}});
    EXPECT_EQ(c.types[0], TrackType{0});
    EXPECT_EQ(c.types[1], TrackType{0});
    auto balanced = carrying_choice(pd, {{2, 2, 2}, {0, 0, 0}});
    EXPECT_TRUE(balanced.types[0].theta());
}

TEST(CarryingChoice, RejectsInconsistentData) {
    auto pd = genus_two();
    EXPECT_THROW(carrying_choice(pd, {{1, 0, 0}, {0, 0, 0}}), NotCarried);
    EXPECT_THROW(carrying_choice(pd, {{-2, 0, 0}, {0, 0, 0}}), NotCarried);
    EXPECT_THROW(carrying_choice(pd, {{2, 0}, {0, 0}}), NotCarried);
}

TEST(LiftLaws, NoBacktrackingOrDuplicates) {
    auto pd = build_example(ExampleKind::Tree, 2, kLen, 0);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    TrackGeometry g(tt);
    EXPECT_EQ(backtracking_violations(g, 8), 0);
    EXPECT_EQ(duplicate_connector_paths(g), 0);
}

TEST(LiftLaws, NoBacktrackingOnLongPaths) {
    // distant cuff lifts are tiny in the disk; they must still be told apart
    auto pd = build_example(ExampleKind::Tree, 2, kLen, 0.25);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    TrackGeometry g(tt);
    EXPECT_EQ(backtracking_violations(g, 12), 0);
    auto closed = genus_two();
    auto ct = build_track(closed, StandardChoice::make(closed, {TrackType{-1}, TrackType{0}}, {}));
    TrackGeometry cg(ct);
    EXPECT_EQ(backtracking_violations(cg, 10), 0);
}

TEST(LiftLaws, ConnectorPathsBetweenCuffsAreUnique) {
    // within one pants, a reduced connector-only path between two cuff vertices is unique per endpoint pair
    std::array<Slot, 3> s{Slot::cuff(kLen), Slot::cuff(kLen), Slot::cuff(kLen)};
    for (int t = -1; t < 3; ++t) {
        auto tt = single_track(s, {t});
        std::map<std::pair<int, int>, std::set<std::vector<int>>> found;
        std::function<void(std::vector<int>&)> walk = [&](std::vector<int>& path) {
            int v = tt.head_of(path.back());
            if (tt.vertices[v].on_cuff) {
                // unoriented: a path and its reversal are the same connector path
                std::vector<int> rev;
                for (auto it = path.rbegin(); it != path.rend(); ++it) rev.push_back(*it ^ 1);
                int a = path.front(), b = path.back() ^ 1;
                found[{std::min(a, b), std::max(a, b)}].insert(std::min(path, rev));
                return;
            }
            if (path.size() > 8) return;
            for (int d : successors(tt, path.back())) {
                path.push_back(d);
                walk(path);
                path.pop_back();
            }
        };
        for (int c : tt.cuff_vertex)
            for (int h : tt.vertices[c].cyclic) {
                if (tt.edges[edge_of(h)].cuff_edge) continue;
                std::vector<int> path{h};
                walk(path);
            }
        for (const auto& [k, paths] : found) EXPECT_EQ(paths.size(), 1u) << "type " << t;
    }
}

TEST(TrackJson, PathRoundTrip) {
    auto pd = build_example(ExampleKind::Ladder, 2, kLen, 0);
    auto tt = build_track(pd, StandardChoice::defaults(pd));
    for (const auto& p : closed_paths(tt, 5)) {
        auto j = to_json(tt, p);
        EXPECT_EQ(path_from_json(tt, j), p);
    }
    EXPECT_EQ(signed_id(forward(0)), 1);
    EXPECT_EQ(signed_id(backward(0)), -1);
    for (int d = 0; d < 20; ++d) EXPECT_EQ(dedge_from_signed(signed_id(d)), d);
    EXPECT_THROW(path_from_json(tt, nlohmann::json::parse("[1000]")), UnknownEdge);
}

TEST(TrackJson, ChoiceRoundTrip) {
    auto pd = build_example(ExampleKind::Ladder, 2, kLen, 0);
    auto c = carrying_choice(pd, {{0, 2, 2, 0}, {1, 1, 0, 1}});
    EXPECT_EQ(c.tangency[pd.gluings[1].a.pants][pd.gluings[1].a.slot], Tangency::Right);
    auto back = choice_from_json(pd, to_json(c));
    EXPECT_EQ(back.types, c.types);
    EXPECT_EQ(back.tangency, c.tangency);
    auto j = to_json(build_track(pd, c));
    EXPECT_TRUE(j.contains("vertices"));
    EXPECT_TRUE(j.contains("edges"));
}
