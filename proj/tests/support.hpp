#pragma once

#include <memory>
#include <optional>
#include <random>

#include "lamtrack/errors.hpp"
#include "lamtrack/measures.hpp"

namespace lamtrack::testing {

// A track built for one Dehn-Thurston multicurve, with its resolved components.
struct Carried {
    std::unique_ptr<TrainTrack> tt;
    std::unique_ptr<TrackGeometry> g;
    DehnThurston dt;
    Multicurve components;
};

inline std::optional<DehnThurston> random_dt(const PantsDecomposition& pd, std::mt19937_64& rng, int max_m = 4,
                                             int max_t = 3) {
    std::uniform_int_distribution<int> um(0, max_m), ut(-max_t, max_t);
    DehnThurston dt;
    for (size_t g = 0; g < pd.gluings.size(); ++g) {
        long long m = um(rng), t = ut(rng);
        if (m == 0) t = std::abs(t);
        dt.m.push_back(m);
        dt.t.push_back(t);
    }
    try {
        auto choice = carrying_choice(pd, dt);
        TrainTrack tt = build_track(pd, choice);
        dt_weights(tt, dt);
    } catch (const NotCarried&) {
        return std::nullopt;
    }
    bool any = false;
    for (size_t g = 0; g < dt.m.size(); ++g) any |= dt.m[g] != 0 || dt.t[g] != 0;
    if (!any) return std::nullopt;
    return dt;
}

inline Carried carried(const PantsDecomposition& pd, const DehnThurston& dt) {
    Carried c;
    c.dt = dt;
    c.tt = std::make_unique<TrainTrack>(build_track(pd, carrying_choice(pd, dt)));
    c.g = std::make_unique<TrackGeometry>(*c.tt);
    Multicurve mc;
    mc.dehn_thurston = dt;
    c.components = resolve(*c.tt, mc);
    return c;
}

inline Carried random_carried(const PantsDecomposition& pd, std::mt19937_64& rng, int max_m = 4, int max_t = 3) {
    for (;;)
        if (auto dt = random_dt(pd, rng, max_m, max_t)) return carried(pd, *dt);
}

// Traversal counts times weights, edge by edge.
inline std::vector<Rational> traversal_weights(const TrainTrack& tt, const Multicurve& mc) {
    std::vector<Rational> w(tt.edges.size(), Rational(0));
    for (const auto& c : mc.components)
        for (int d : c.path.dedges) w[edge_of(d)] += c.weight;
    return w;
}

inline Multicurve scaled(const Multicurve& mc, const Rational& k) {
    Multicurve out = mc;
    for (auto& c : out.components) c.weight *= k;
    out.dt_weight *= k;
    return out;
}

}  // namespace lamtrack::testing
