#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace opgfn::env {

// Objective values u(x); componentwise <= defines Pareto dominance.
using ObjectiveVector = std::vector<double>;

// A vertex of the environment DAG. For grids `cells` holds the integer
// coordinates; for sequences it holds the filled symbols in order.
struct State {
    std::vector<int> cells;
    bool terminal = false;

    bool operator==(State const&) const = default;
};

struct StateHash {
    std::size_t operator()(State const& s) const noexcept;
};

// Index into an environment's forward or backward action head.
struct ActionId {
    std::uint32_t index = 0;

    auto operator<=>(ActionId const&) const = default;
};

// a is weakly dominated by b: a <= b componentwise.
[[nodiscard]] bool weakly_dominated(std::span<double const> a, std::span<double const> b);

// a <= b componentwise and a != b.
[[nodiscard]] bool strictly_dominated(std::span<double const> a, std::span<double const> b);

} // namespace opgfn::env
