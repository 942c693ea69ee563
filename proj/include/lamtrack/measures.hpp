#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

#include "lamtrack/cover.hpp"
#include "lamtrack/traintrack.hpp"

namespace lamtrack {

using Rational = boost::rational<long long>;

// Weights per edge. Exact systems keep rationals; float systems keep doubles.
struct EdgeWeightSystem {
    bool exact = true;
    std::vector<Rational> q;
    std::vector<double> x;

    static EdgeWeightSystem zeros(const TrainTrack& tt, bool exact = true);
    size_t size() const { return exact ? q.size() : x.size(); }
    double value(int edge) const;
    bool operator==(const EdgeWeightSystem& o) const;
};

struct Component {
    EdgePath path;  // closed
    Rational weight{1};
};

// A weighted multicurve, either as closed edge paths or as Dehn-Thurston data with one weight.
struct Multicurve {
    std::vector<Component> components;
    std::optional<DehnThurston> dehn_thurston;
    Rational dt_weight{1};

    bool empty() const { return components.empty() && !dehn_thurston; }
};

// Integer weights of the Dehn-Thurston multicurve on its carrying track. Throws NotCarried.
EdgeWeightSystem dt_weights(const TrainTrack& tt, const DehnThurston& dt);

// Throws NotCarried.
EdgeWeightSystem weights_from_multicurve(const TrainTrack& tt, const Multicurve& mc);
bool validate_switch(const TrainTrack& tt, const EdgeWeightSystem& w);

// Float weights must sit within 1e-13 of a fraction with denominator <= 1e5.
// Throws SwitchViolation / IrrationalWeight.
Multicurve realize_weights(const TrainTrack& tt, const EdgeWeightSystem& w);

// Dehn-Thurston data replaced by its closed-path components.
Multicurve resolve(const TrainTrack& tt, const Multicurve& mc);

// Closest fraction with denominator <= max_den; throws IrrationalWeight if it misses by more than tol.
Rational to_rational(double v, long long max_den = 1000000, double tol = 1e-9);
double to_double(const Rational& r);

double sup_norm(const EdgeWeightSystem& w);

// Largest distance from a vertex of the component's path to its geodesic.
double fellow_travel_distance(const TrackGeometry& g, const EdgePath& p);

// Lifts of the component's geodesic through lifted vertices.
std::vector<Geodesic> lifts_through(const TrackGeometry& g, const EdgePath& p, const std::vector<LiftedVertex>& at);

struct NormReport {
    double sup_norm = 0;
    double thurston_estimate = 0;
    double d = 0;         // fellow-travel distance plus the longest edge
    double C = 0;         // covering bound C(d)
    double k_prime = 0;   // most lifted edges within reach of a unit ball
    int centers = 0;
    bool converged = false;  // the ball at some center already holds 95% of the estimate
};

struct SkeletonSegment {
    Mat2 start;  // frame at the start, facing along the segment
    double length;
    bool cuff;
};

// Cuffs and seams of the base lift of every pants; seams running into a cusp are cut at length 2.
std::vector<SkeletonSegment> skeleton_segments(const TrackGeometry& g);

// Evenly spaced centers along the skeleton segments, about `count` in total.
std::vector<Point> skeleton_centers(const TrackGeometry& g, int count);

double covering_bound(double d);

// Largest mass of lifts meeting a unit ball centered on the skeleton: each of the
// sample_count centers owns a cell of its segment, and every ball centered in the cell is examined.
NormReport thurston_norm_estimate(const TrackGeometry& g, const Multicurve& mc, int sample_count, int threads = 1);

// Total weight of lifts with one endpoint in each arc. Throws BoundaryHit / DegenerateBox.
double box_mass(const TrackGeometry& g, const Multicurve& mc, const GeodesicBox& box);

nlohmann::json to_json(const EdgeWeightSystem& w);
EdgeWeightSystem weights_from_json(const TrainTrack& tt, const nlohmann::json& j);  // throws ParseError
nlohmann::json to_json(const TrainTrack& tt, const Multicurve& mc);
Multicurve multicurve_from_json(const TrainTrack& tt, const nlohmann::json& j);  // throws ParseError / UnknownEdge
DehnThurston dehn_thurston_from_json(const nlohmann::json& j);
std::string to_string(const Rational& r);
Rational rational_from_string(const std::string& s);  // throws ParseError

}  // namespace lamtrack
