#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "opgfn/env/types.hpp"

namespace opgfn::metrics {

using Points = std::vector<env::ObjectiveVector>;

enum class FrontProvenance { true_front, estimated, reference_discretization };

struct FrontSet {
    Points points;
    FrontProvenance provenance = FrontProvenance::estimated;
};

[[nodiscard]] std::string to_string(FrontProvenance p);

// Indices of points not strictly dominated by any other point, ascending.
// Identical vectors are all kept.
[[nodiscard]] std::vector<std::size_t> pareto_indices(std::span<env::ObjectiveVector const> points);

[[nodiscard]] FrontSet pareto_front(std::span<env::ObjectiveVector const> points,
                                    FrontProvenance provenance = FrontProvenance::estimated);

} // namespace opgfn::metrics
