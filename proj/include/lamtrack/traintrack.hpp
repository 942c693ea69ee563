#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "lamtrack/surface.hpp"

namespace lamtrack {

enum class Tangency { Left, Right };

struct StandardChoice {
    std::vector<TrackType> types;                    // per pants
    std::vector<std::array<Tangency, 3>> tangency;   // requested per pants slot

    static StandardChoice defaults(const PantsDecomposition& pd);
    // Same tangency on both sides of every cuff, indexed like pd.cuffs().
    static StandardChoice make(const PantsDecomposition& pd, std::vector<TrackType> types,
                               const std::vector<Tangency>& per_cuff);
};

// Half-edge h = 2 * edge + (h at the head end). A directed edge is named by the
// half-edge it leaves from, so d and d ^ 1 traverse the same edge in opposite ways.
inline int edge_of(int half) { return half >> 1; }
inline int reverse(int dedge) { return dedge ^ 1; }
inline int forward(int edge) { return 2 * edge; }
inline int backward(int edge) { return 2 * edge + 1; }

struct TrackVertex {
    bool on_cuff = false;
    int cuff = -1;             // for cuff vertices
    int pants = -1;            // home pants
    std::vector<int> cyclic;   // half-edges, counterclockwise
    std::vector<int> side;     // smooth side (0/1) of each entry
    std::vector<int> punctures;  // corner k lies between cyclic[k] and cyclic[k+1]
};

enum class EdgeRole { Cuff, Stem, Branch, LoopOut, LoopBack, Loop, Arc };

struct TrackEdge {
    int tail = -1, head = -1;
    EdgeRole role = EdgeRole::Cuff;
    int slot = -1;            // stems: their slot; branches: first slot; loops: the slot they encircle
    bool cuff_edge = false;
    int cuff = -1;            // cuff edges
    int pants = -1;           // connectors: the pants they run through; cuff edges: side a
    std::vector<int> seams;   // seams of the pants model crossed, in order, tail to head
    int tail_slot = -1, head_slot = -1;  // pants slot at a cuff endpoint
    std::string name;
};

struct TrainTrack {
    PantsDecomposition pd;
    StandardChoice choice;
    std::vector<Cuff> cuffs;
    std::vector<TrackVertex> vertices;
    std::vector<TrackEdge> edges;
    std::vector<int> cuff_vertex;  // per cuff
    std::vector<int> cuff_edge;    // per cuff

    int half_vertex(int half) const;
    int position(int half) const;       // index in its vertex's cyclic order
    int side_of(int half) const;
    int tail_of(int dedge) const { return half_vertex(dedge); }
    int head_of(int dedge) const { return half_vertex(dedge ^ 1); }
    bool is_connector_vertex(int v) const { return !vertices[v].on_cuff; }
};

TrainTrack build_track(const PantsDecomposition& pd, const StandardChoice& choice);

enum class RegionKind { Triangle, PuncturedMonogon, Boundary };

struct Region {
    RegionKind kind;
    int cusps = 0;
    bool punctured = false;
    std::vector<int> boundary;  // directed edges with the region on their left
};

// Throws MalformedTrack on an impossible cusp count or Euler characteristic.
std::vector<Region> regions(const TrainTrack& tt);
std::string to_string(RegionKind k);

// Directed edges; the trailing `period` entries repeat forever. period == size
// is a closed path, period == 0 a finite one.
struct EdgePath {
    std::vector<int> dedges;
    int period = 0;

    bool closed() const { return period > 0 && period == static_cast<int>(dedges.size()); }
    bool operator==(const EdgePath&) const = default;
};

// Throws UnknownEdge.
bool is_edge_path(const TrainTrack& tt, const EdgePath& p);
bool paths_cross(const TrainTrack& tt, const EdgePath& a, const EdgePath& b);
bool self_crosses(const TrainTrack& tt, const EdgePath& a);

// Canonical rotation/orientation of a closed path.
EdgePath canonical_cycle(const EdgePath& p);
EdgePath reversed(const EdgePath& p);

// Dehn-Thurston coordinates, indexed by gluing.
struct DehnThurston {
    std::vector<long long> m;  // intersection numbers
    std::vector<long long> t;  // twists
};

// Throws NotCarried.
StandardChoice carrying_choice(const PantsDecomposition& pd, const DehnThurston& dt);

nlohmann::json to_json(const TrainTrack& tt);
nlohmann::json to_json(const TrainTrack& tt, const EdgePath& p);
EdgePath path_from_json(const TrainTrack& tt, const nlohmann::json& j);  // throws ParseError / UnknownEdge
nlohmann::json to_json(const StandardChoice& c);
StandardChoice choice_from_json(const PantsDecomposition& pd, const nlohmann::json& j);
int signed_id(int dedge);
int dedge_from_signed(int id);

}  // namespace lamtrack
