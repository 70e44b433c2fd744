#pragma once

// Parameter sets and solved surfaces shared across tests. Surfaces are solved once per process.

#include "hotelling/grid.hpp"
#include "hotelling/model.hpp"
#include "hotelling/solver.hpp"

namespace fixtures {

inline hotelling::ModelParams set_a() { return hotelling::validate(0.5, 0.02, 2.5, 2.0, 5.0); }
inline hotelling::ModelParams set_b() { return hotelling::validate(0.5, 0.02, 0.5, 10.0, 1.0); }
inline hotelling::ModelParams sample_set() { return hotelling::validate(0.5, 0.02, 1.0, 5.0, 5.0); }

inline const hotelling::ValueSurface& surface_a() {
    static const auto s = hotelling::solve(set_a(), hotelling::default_grid(set_a(), 1.0));
    return s;
}

inline const hotelling::ValueSurface& surface_b() {
    static const auto s = hotelling::solve(set_b(), hotelling::default_grid(set_b(), 1.0));
    return s;
}

}  // namespace fixtures
