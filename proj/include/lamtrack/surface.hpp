#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lamtrack/hyp_trig.hpp"
#include "lamtrack/mobius.hpp"

namespace lamtrack {

struct Slot {
    bool cusp = false;
    Length length = 0;  // cuff length, unused for cusps

    static Slot cuff(Length len) { return {false, len}; }
    static Slot make_cusp() { return {true, 0}; }
};

struct PairOfPants {
    int id = 0;
    std::array<Slot, 3> slots;

    int cusp_count() const;
    int cuff_count() const { return 3 - cusp_count(); }
};

struct SlotRef {
    int pants = 0;  // index into PantsDecomposition::pants
    int slot = 0;

    bool operator==(const SlotRef&) const = default;
};

// Positive twist is a right earthquake along the cuff.
struct Gluing {
    SlotRef a, b;
    double twist = 0;
};

struct Cuff {
    SlotRef side_a;
    std::optional<SlotRef> side_b;  // empty for a truncation boundary
    Length length = 0;
    double twist = 0;
    int gluing = -1;
};

struct PantsDecomposition {
    std::vector<PairOfPants> pants;
    std::vector<Gluing> gluings;

    // Glued cuffs first (in gluing order), then unglued cuff slots.
    std::vector<Cuff> cuffs() const;
    // cuff index of every (pants, slot); -1 for cusps
    std::vector<std::array<int, 3>> cuff_index() const;
    int index_of(int pants_id) const;
};

// Throws InvalidPants / InvalidGluing.
void validate_structure(const PantsDecomposition& pd);

enum class ExampleKind { Flute, Ladder, Tree };

PantsDecomposition build_example(ExampleKind kind, int depth, Length cuff_len, double twist);
std::optional<ExampleKind> parse_example_kind(const std::string& s);

bool validate_bounded(const PantsDecomposition& pd, double M);

// Geometry of one pants in its own model. The front right-angled hexagon is
// traversed counterclockwise as c0, s01, c1, s12, c2, s20.
struct PantsModel {
    std::array<Length, 3> half{};  // half cuff lengths (0 for cusps)
    std::array<bool, 3> cusp{};
    std::array<Length, 3> seam_length{};  // seam i joins slot i and i+1; inf if it runs into a cusp
    std::array<Mat2, 3> seam_reflection;  // reflection in seam i
    std::array<Mat2, 3> midpoint_frame;   // frame at the midpoint of the front side of cuff i,
                                          // facing along the boundary orientation
    std::array<Mat2, 3> boundary;         // boundary element of slot i (translation by the cuff length)
    Point interior;                       // a reference point inside the front hexagon
};

PantsModel pants_model(const PairOfPants& p);

// Maps side-b pants model coordinates to side-a pants model coordinates.
Mat2 gluing_transition(const PantsModel& a, int slot_a, const PantsModel& b, int slot_b, double twist);

struct Holonomy {
    int root = 0;                                // pants placed at the identity, central in the gluing graph
    std::vector<Mat2> placement;                 // pants model -> base picture
    std::vector<std::array<Mat2, 3>> boundary;   // per pants, per slot, in base coordinates
    std::vector<Mat2> cuff;                      // per cuff, oriented by side a
    std::vector<int> tree_gluings;
    std::vector<Mat2> loops;                     // one per non-tree gluing
};

// Throws DisconnectedError.
Holonomy holonomy(const PantsDecomposition& pd);

// Complementary-arc system per pants.
struct TrackType {
    int self_slot = -1;  // -1: the three seams; otherwise the orthogeodesic from this cuff to itself

    bool theta() const { return self_slot < 0; }
    bool operator==(const TrackType&) const = default;
};

std::vector<TrackType> valid_types(const PairOfPants& p);
TrackType default_type(const PairOfPants& p);

struct SkeletonArc {
    int from_slot, to_slot;
    Length length;
};

struct PantsSkeleton {
    TrackType type;
    std::vector<SkeletonArc> arcs;
    std::array<std::vector<Length>, 3> subarcs;  // cyclic pieces of each cuff
};

struct Skeleton {
    std::vector<PantsSkeleton> pants;
    double M1 = 1;
};

Skeleton skeleton(const PantsDecomposition& pd, const std::vector<TrackType>& types = {});
PantsSkeleton pants_skeleton(const PairOfPants& p, TrackType type);

nlohmann::json to_json(const PantsDecomposition& pd);
PantsDecomposition surface_from_json(const nlohmann::json& j);  // throws ParseError

}  // namespace lamtrack
