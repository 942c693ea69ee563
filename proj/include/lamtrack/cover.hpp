#pragma once

#include <array>
#include <functional>
#include <random>
#include <vector>

#include <json.hpp>

#include "lamtrack/mobius.hpp"
#include "lamtrack/traintrack.hpp"

namespace lamtrack {

// Closed counterclockwise arc of the circle at infinity.
struct IdealArc {
    IdealPoint lo, hi;

    bool contains(IdealPoint p, double eps = 0) const { return on_arc(lo, hi, p, eps); }
    double length() const { return arc_length(lo, hi); }
};

// Geodesics with one endpoint in I and the other in J.
struct GeodesicBox {
    IdealArc I, J;

    bool contains(const Geodesic& g, double eps = 0) const;
};

// Precomputed pants models and per-edge transition matrices.
struct TrackGeometry {
    const TrainTrack* tt = nullptr;
    std::vector<PantsModel> models;
    std::vector<Mat2> forward;      // per edge, tail home -> head home
    std::vector<Point> position;    // per vertex, in its home model
    std::vector<Mat2> placement;    // per pants, from the surface holonomy
    std::vector<Mat2> cuff_element; // per cuff vertex home, translation along the cuff edge

    explicit TrackGeometry(const TrainTrack& t);
    Mat2 step(int dedge) const;
    Mat2 product(const std::vector<int>& dedges) const;
    Mat2 home_placement(int vertex) const;  // placement of a vertex lift in the base picture
    double max_edge_length() const;
};

struct LiftedVertex {
    int vertex = -1;
    Mat2 placement;

    Point point(const TrackGeometry& g) const { return apply(placement, g.position[vertex]); }
    LiftedVertex along(const TrackGeometry& g, int dedge) const { return {g.tt->head_of(dedge), placement * g.step(dedge)}; }
};

// Throws ParabolicOrElliptic.
Mat2 closed_path_holonomy(const TrackGeometry& g, const EdgePath& p);

// Forward endpoint of an eventually periodic path starting at a lift of its first vertex.
IdealPoint endpoint_of_path(const TrackGeometry& g, const EdgePath& p, const Mat2& base = Mat2{});

// Geodesic of a bi-infinite path: `back` is a closed path at the start vertex repeated
// before it, `middle` runs to the start of the closed path `ahead`.
Geodesic geodesic_of(const TrackGeometry& g, const std::vector<int>& back, const std::vector<int>& middle,
                     const std::vector<int>& ahead, const Mat2& base = Mat2{});

// Axis of the cuff lift through a vertex lift.
Geodesic cuff_lift(const TrackGeometry& g, const LiftedVertex& v);

// Throws DegenerateBox.
double liouville(const GeodesicBox& box);
// Box [a, b] x [c, d] of the real chart, a < b < c < d with d possibly infinite. Throws DegenerateBox.
double liouville_real(double a, double b, double c, double d);

struct CarrierBoxes {
    GeodesicBox inner;   // Q'
    GeodesicBox outer;   // Q
    std::array<double, 4> margins{};
    bool cuff_span = false;
};

bool is_connector_span(const TrainTrack& tt, const std::vector<int>& gamma);
bool is_cuff_span(const TrainTrack& tt, const std::vector<int>& gamma);

// Throws NotSpanning.
CarrierBoxes carrier_boxes(const TrackGeometry& g, const std::vector<int>& gamma, const Mat2& base = Mat2{});

// All connector spans (connector paths between cuff vertices) of length <= max_len.
std::vector<std::vector<int>> connector_spans(const TrainTrack& tt, int max_len);

// Random smooth walk continuing from an arrival half-edge, ending on a cuff cycle.
struct WalkTail {
    std::vector<int> finite;
    int cycle = -1;  // directed cuff edge repeated forever
};
WalkTail random_tail(const TrainTrack& tt, int arrival_half, int min_steps, std::mt19937_64& rng);

struct SpanCheck {
    int through = 0, through_inside = 0;
    int avoiding = 0, avoiding_outside = 0;
};
SpanCheck monte_carlo_span_check(const TrackGeometry& g, const std::vector<int>& gamma, const CarrierBoxes& boxes,
                                 int samples, std::mt19937_64& rng, const Mat2& base = Mat2{});

// Lift-level counts on paths of bounded length.
int backtracking_violations(const TrackGeometry& g, int max_len);
int duplicate_connector_paths(const TrackGeometry& g);

// Lifted vertices within `radius` of a predicate-defined region, found by descent then flood.
std::vector<LiftedVertex> lifted_vertices_near(const TrackGeometry& g, const std::function<double(Point)>& dist,
                                               double radius, double slack = -1);

// Endpoints as boundary angles in the disk chart: {"chart": "angle", ...}.
nlohmann::json to_json(const Geodesic& g);
nlohmann::json to_json(const GeodesicBox& b);
GeodesicBox box_from_json(const nlohmann::json& j);  // throws ParseError

}  // namespace lamtrack
