#pragma once

#include <set>
#include <string>
#include <vector>

#include "lamtrack/cover.hpp"
#include "lamtrack/measures.hpp"

namespace lamtrack {

enum class Model { Disk, HalfPlane };

struct RenderSpec {
    Model model = Model::Disk;
    std::set<std::string> layers{"cuff-lifts", "track"};  // cuff-lifts, skeleton, track, boxes, carried-geodesics
    double radius = 3;                                     // lifted vertices within this distance of the base point

    static const std::set<std::string>& known_layers();
    void validate() const;  // throws ParseError
};

// Geodesics are circular arcs (or lines) orthogonal to the boundary of the model.
std::string render_svg(const TrackGeometry& g, const Multicurve& mc, const std::vector<GeodesicBox>& boxes,
                       const RenderSpec& spec);

}  // namespace lamtrack
