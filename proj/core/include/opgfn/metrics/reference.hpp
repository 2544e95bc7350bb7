#pragma once

#include <cstddef>

#include "opgfn/env/environment.hpp"
#include "opgfn/metrics/pareto.hpp"

namespace opgfn::metrics {

inline constexpr std::size_t default_front_resolution = 64;

// Exact Pareto front over all terminals when the environment is enumerable;
// otherwise a grid over the faces of [0,1]^D that touch the all-ones corner,
// with `resolution` points per face edge, deduplicated.
[[nodiscard]] FrontSet reference_front(env::Environment const& env,
                                       std::size_t resolution = default_front_resolution);

// Points of [0,1]^dim with at least one coordinate equal to 1, each
// coordinate on the lattice {0, 1/(r-1), ..., 1}; lexicographic order.
[[nodiscard]] Points discretized_upper_faces(std::size_t dim, std::size_t resolution);

} // namespace opgfn::metrics
