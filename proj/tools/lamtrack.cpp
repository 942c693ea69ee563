#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "lamtrack/cover.hpp"
#include "lamtrack/errors.hpp"
#include "lamtrack/io.hpp"
#include "lamtrack/measures.hpp"
#include "lamtrack/render.hpp"
#include "lamtrack/surface.hpp"
#include "lamtrack/traintrack.hpp"

using namespace lamtrack;
using nlohmann::json;

namespace {

struct Options {
    std::string output = "-";
    std::uint64_t seed = 0;
    int threads = 1;
    std::string surface, choice, multicurve, weights, boxes, dt;

    // gen
    std::string kind;
    int depth = 1;
    double length = 2.0, twist = 0.0;
    bool random_twist = false;

    // validate
    double bound = 0;
    int span_length = 0, samples = 0;

    std::string mode = "rational";
    int centers = 1000;
    std::string model = "disk", layers = "cuff-lifts,track";
    double radius = 3;
};

void emit(const Options& o, const std::string& text) {
    if (o.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(o.output);
    if (!out) throw std::runtime_error(o.output + ": cannot write");
    out << text;
}

PantsDecomposition load_surface(const Options& o) {
    PantsDecomposition pd = surface_from_json(read_json_file(o.surface));
    validate_structure(pd);
    return pd;
}

// Track choice: --choice, then a "choice" field in the data file, then the carrying choice of
// Dehn-Thurston data, then the defaults.
StandardChoice pick_choice(const Options& o, const PantsDecomposition& pd, const json* data) {
    if (!o.choice.empty()) return choice_from_json(pd, read_json_file(o.choice));
    if (data && data->is_object() && data->contains("choice")) return choice_from_json(pd, (*data)["choice"]);
    if (!o.dt.empty()) return carrying_choice(pd, dehn_thurston_from_json(read_json_file(o.dt)));
    if (data && data->is_object() && data->contains("dehn_thurston"))
        return carrying_choice(pd, dehn_thurston_from_json((*data)["dehn_thurston"]));
    return StandardChoice::defaults(pd);
}

json with_choice(json j, const TrainTrack& tt) {
    j["choice"] = to_json(tt.choice);
    return j;
}

std::vector<GeodesicBox> load_boxes(const std::string& path) {
    json j = read_json_file(path);
    if (j.is_object() && j.contains("boxes")) j = j["boxes"];
    if (!j.is_array()) throw ParseError(path + ": expected an array of boxes");
    std::vector<GeodesicBox> out;
    for (size_t i = 0; i < j.size(); ++i) {
        try {
            out.push_back(box_from_json(j[i].is_object() && j[i].contains("box") ? j[i]["box"] : j[i]));
        } catch (const ParseError& e) {
            throw ParseError(path + ": boxes[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return out;
}

int cmd_gen(const Options& o) {
    auto kind = parse_example_kind(o.kind);
    if (!kind) throw ParseError("--kind: expected tree, ladder or flute");
    PantsDecomposition pd = build_example(*kind, o.depth, o.length, o.twist);
    if (o.random_twist) {
        std::mt19937_64 rng(o.seed);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (auto& g : pd.gluings) g.twist = u(rng);
    }
    emit(o, canonical_dump(to_json(pd)));
    return 0;
}

int cmd_validate(const Options& o) {
    PantsDecomposition pd = load_surface(o);
    json report;
    bool ok = true;
    if (o.bound > 0) {
        bool b = validate_bounded(pd, o.bound);
        report["bounded"] = b;
        ok = ok && b;
    }
    json data;
    if (!o.weights.empty()) data = read_json_file(o.weights);
    TrainTrack tt = build_track(pd, pick_choice(o, pd, o.weights.empty() ? nullptr : &data));
    report["regions"] = regions(tt).size();
    if (!o.weights.empty()) {
        bool s = validate_switch(tt, weights_from_json(tt, data));
        report["switch"] = s;
        ok = ok && s;
    }
    if (o.span_length > 0) {
        TrackGeometry g(tt);
        std::mt19937_64 rng(o.seed);
        int spans = 0, failed = 0;
        for (const auto& s : connector_spans(tt, o.span_length)) {
            CarrierBoxes cb = carrier_boxes(g, s);
            SpanCheck r = monte_carlo_span_check(g, s, cb, o.samples > 0 ? o.samples : 50, rng);
            bool good = r.through_inside == r.through && r.avoiding_outside == r.avoiding;
            for (double m : cb.margins) good = good && m > 0;
            ++spans;
            if (!good) ++failed;
        }
        report["spans"] = {{"checked", spans}, {"failed", failed}};
        ok = ok && failed == 0;
    }
    report["ok"] = ok;
    emit(o, canonical_dump(report));
    return ok ? 0 : 1;
}

int cmd_track(const Options& o) {
    PantsDecomposition pd = load_surface(o);
    TrainTrack tt = build_track(pd, pick_choice(o, pd, nullptr));
    emit(o, canonical_dump(to_json(tt)));
    return 0;
}

struct Loaded {
    PantsDecomposition pd;
    TrainTrack tt;
    Multicurve mc;
};

Loaded load_multicurve(const Options& o) {
    PantsDecomposition pd = load_surface(o);
    json data = read_json_file(o.multicurve);
    TrainTrack tt = build_track(pd, pick_choice(o, pd, &data));
    Multicurve mc = multicurve_from_json(tt, data);
    return {pd, tt, mc};
}

int cmd_weights(const Options& o) {
    Loaded l = load_multicurve(o);
    EdgeWeightSystem w = weights_from_multicurve(l.tt, l.mc);
    if (o.mode == "float") {
        EdgeWeightSystem f = EdgeWeightSystem::zeros(l.tt, false);
        for (size_t e = 0; e < w.size(); ++e) f.x[e] = w.value(static_cast<int>(e));
        w = f;
    }
    emit(o, canonical_dump(with_choice(to_json(w), l.tt)));
    return 0;
}

int cmd_realize(const Options& o) {
    PantsDecomposition pd = load_surface(o);
    json data = read_json_file(o.weights);
    TrainTrack tt = build_track(pd, pick_choice(o, pd, &data));
    Multicurve mc = realize_weights(tt, weights_from_json(tt, data));
    emit(o, canonical_dump(with_choice(to_json(tt, mc), tt)));
    return 0;
}

int cmd_norms(const Options& o) {
    Loaded l = load_multicurve(o);
    TrackGeometry g(l.tt);
    NormReport r = thurston_norm_estimate(g, l.mc, o.centers, o.threads);
    json j{{"sup_norm", r.sup_norm},
           {"thurston_estimate", r.thurston_estimate},
           {"fellow_travel_d", r.d},
           {"C", r.C},
           {"k_prime", r.k_prime},
           {"centers", r.centers},
           {"converged", r.converged},
           {"sup_le_C_th", r.sup_norm <= r.C * r.thurston_estimate + 1e-9},
           {"th_le_k_sup", r.thurston_estimate <= r.k_prime * r.sup_norm + 1e-9}};
    emit(o, canonical_dump(j));
    return 0;
}

int cmd_boxmass(const Options& o) {
    Loaded l = load_multicurve(o);
    TrackGeometry g(l.tt);
    std::vector<GeodesicBox> boxes;
    if (!o.boxes.empty()) {
        boxes = load_boxes(o.boxes);
    } else {
        for (const auto& s : connector_spans(l.tt, o.span_length > 0 ? o.span_length : 3))
            boxes.push_back(carrier_boxes(g, s).outer);
    }
    json arr = json::array();
    for (const auto& b : boxes) arr.push_back({{"box", to_json(b)}, {"mass", box_mass(g, l.mc, b)}});
    emit(o, canonical_dump({{"boxes", arr}}));
    return 0;
}

int cmd_render(const Options& o) {
    PantsDecomposition pd = load_surface(o);
    json data;
    if (!o.multicurve.empty()) data = read_json_file(o.multicurve);
    TrainTrack tt = build_track(pd, pick_choice(o, pd, o.multicurve.empty() ? nullptr : &data));
    Multicurve mc;
    if (!o.multicurve.empty()) mc = multicurve_from_json(tt, data);
    RenderSpec spec;
    if (o.model == "disk")
        spec.model = Model::Disk;
    else if (o.model == "halfplane")
        spec.model = Model::HalfPlane;
    else
        throw ParseError("--model: expected disk or halfplane");
    spec.layers.clear();
    std::stringstream ss(o.layers);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) spec.layers.insert(item);
    spec.radius = o.radius;
    std::vector<GeodesicBox> boxes;
    if (!o.boxes.empty()) boxes = load_boxes(o.boxes);
    TrackGeometry g(tt);
    emit(o, render_svg(g, mc, boxes, spec));
    return 0;
}

bool malformed(const Error& e) {
    return dynamic_cast<const ParseError*>(&e) || dynamic_cast<const UnknownEdge*>(&e) ||
           dynamic_cast<const InvalidPants*>(&e) || dynamic_cast<const InvalidGluing*>(&e) ||
           dynamic_cast<const DisconnectedError*>(&e);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measured laminations on pants decompositions via train tracks"};
    app.require_subcommand(1);
    Options o;

    auto out = [&](CLI::App* c) {
        c->add_option("-o,--output", o.output, "Output file (default stdout)");
        c->add_option("--seed", o.seed, "Seed for randomized operations");
        c->add_option("--threads", o.threads, "Worker threads for parallel reductions")->check(CLI::PositiveNumber);
    };
    auto surf = [&](CLI::App* c) { c->add_option("-s,--surface", o.surface, "Surface JSON")->required(); };
    auto choice = [&](CLI::App* c) {
        c->add_option("--choice", o.choice, "Track choice JSON");
        c->add_option("--dt", o.dt, "Dehn-Thurston JSON selecting the carrying track");
    };

    auto* gen = app.add_subcommand("gen", "Write an example surface");
    gen->add_option("--kind", o.kind, "tree, ladder or flute")->required();
    gen->add_option("--depth", o.depth, "Truncation depth")->check(CLI::NonNegativeNumber);
    gen->add_option("--length", o.length, "Cuff length")->check(CLI::PositiveNumber);
    gen->add_option("--twist", o.twist, "Twist of every gluing");
    gen->add_flag("--random-twist", o.random_twist, "Draw twists in [-1/2, 1/2) from --seed");
    out(gen);

    auto* val = app.add_subcommand("validate", "Check bounded geometry, switch relations and carrier boxes");
    surf(val);
    choice(val);
    val->add_option("--bound", o.bound, "Bounded-geometry constant M");
    val->add_option("--weights", o.weights, "Weight JSON to check against the switch relations");
    val->add_option("--spans", o.span_length, "Check carrier boxes of connector spans up to this length");
    val->add_option("--samples", o.samples, "Monte-Carlo samples per span");
    out(val);

    auto* trk = app.add_subcommand("track", "Build and dump the train track");
    surf(trk);
    choice(trk);
    out(trk);

    auto* wts = app.add_subcommand("weights", "Edge weights of a multicurve");
    surf(wts);
    choice(wts);
    wts->add_option("-m,--multicurve", o.multicurve, "Multicurve JSON")->required();
    wts->add_option("--mode", o.mode, "rational or float")->check(CLI::IsMember({"rational", "float"}));
    out(wts);

    auto* rea = app.add_subcommand("realize", "Weighted multicurve of rational edge weights");
    surf(rea);
    choice(rea);
    rea->add_option("-w,--weights", o.weights, "Weight JSON")->required();
    out(rea);

    auto* nrm = app.add_subcommand("norms", "Sup norm and Thurston norm estimate");
    surf(nrm);
    choice(nrm);
    nrm->add_option("-m,--multicurve", o.multicurve, "Multicurve JSON")->required();
    nrm->add_option("--centers", o.centers, "Number of ball centers")->check(CLI::PositiveNumber);
    out(nrm);

    auto* box = app.add_subcommand("boxmass", "Masses of geodesic boxes");
    surf(box);
    choice(box);
    box->add_option("-m,--multicurve", o.multicurve, "Multicurve JSON")->required();
    box->add_option("--boxes", o.boxes, "Box JSON array (default: outer carrier boxes of connector spans)");
    box->add_option("--spans", o.span_length, "Connector span length for the default boxes");
    out(box);

    auto* ren = app.add_subcommand("render", "SVG picture of the universal cover");
    surf(ren);
    choice(ren);
    ren->add_option("-m,--multicurve", o.multicurve, "Multicurve JSON");
    ren->add_option("--boxes", o.boxes, "Box JSON array");
    ren->add_option("--model", o.model, "disk or halfplane");
    ren->add_option("--layers", o.layers, "Comma-separated: cuff-lifts, skeleton, track, boxes, carried-geodesics");
    ren->add_option("--radius", o.radius, "Lifted vertices within this distance of the base point");
    out(ren);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*gen) return cmd_gen(o);
        if (*val) return cmd_validate(o);
        if (*trk) return cmd_track(o);
        if (*wts) return cmd_weights(o);
        if (*rea) return cmd_realize(o);
        if (*nrm) return cmd_norms(o);
        if (*box) return cmd_boxmass(o);
        if (*ren) return cmd_render(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return malformed(e) ? 2 : 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
