#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opgfn/env/types.hpp"

namespace opgfn::env {

enum class EnvKind { hypergrid, cosine_grid, sequence };

// Default cap on exhaustive terminal enumeration.
inline constexpr std::uint64_t default_enumeration_cap = 10'000'000;

// A finite DAG-structured MDP with a distinguished initial state and
// terminal states carrying an objective vector.
//
// Implementations are immutable after construction; every member is a pure
// function of its arguments and safe to call concurrently.
class Environment {
public:
    virtual ~Environment() = default;

    [[nodiscard]] virtual EnvKind kind() const = 0;
    // Canonical text description, used for checkpoint/env hashing.
    [[nodiscard]] virtual std::string describe() const = 0;

    [[nodiscard]] virtual State initial_state() const = 0;

    // Widths of the forward and backward action heads.
    [[nodiscard]] virtual std::size_t num_forward_actions() const = 0;
    [[nodiscard]] virtual std::size_t num_backward_actions() const = 0;

    // Legal forward edges from a non-terminal state, ascending by index.
    [[nodiscard]] virtual std::vector<ActionId> forward_actions(State const& s) const = 0;
    // Legal parent edges of any state other than s0, ascending by index.
    [[nodiscard]] virtual std::vector<ActionId> backward_actions(State const& s) const = 0;

    [[nodiscard]] virtual State step(State const& s, ActionId forward) const = 0;
    [[nodiscard]] virtual State unstep(State const& s, ActionId backward) const = 0;

    // Backward action at `step(parent, forward)` that returns to `parent`.
    [[nodiscard]] virtual ActionId backward_inverse(State const& parent, ActionId forward) const = 0;
    // Forward action at `unstep(child, backward)` that returns to `child`.
    [[nodiscard]] virtual ActionId forward_inverse(State const& child, ActionId backward) const = 0;

    [[nodiscard]] virtual std::size_t objective_dim() const = 0;
    [[nodiscard]] virtual ObjectiveVector objective(State const& terminal) const = 0;
    [[nodiscard]] virtual std::vector<std::string> objective_names() const = 0;

    // Upper bound on the number of actions in a complete trajectory.
    [[nodiscard]] virtual std::size_t max_trajectory_length() const = 0;

    // Number of terminal states; std::nullopt when it does not fit in 64 bits.
    [[nodiscard]] virtual std::optional<std::uint64_t> terminal_count() const = 0;
    [[nodiscard]] virtual std::uint64_t enumeration_cap() const { return default_enumeration_cap; }
    [[nodiscard]] bool enumerable() const;

    // Visits each terminal exactly once, in terminal_index order.
    // Throws CapabilityError when the space exceeds the enumeration cap.
    void for_each_terminal(std::function<void(State const&)> const& visit) const;
    [[nodiscard]] std::vector<State> enumerate_terminals() const;

    // Dense index of a terminal in [0, terminal_count()); enumerable envs only.
    [[nodiscard]] virtual std::size_t terminal_index(State const& terminal) const = 0;
    [[nodiscard]] virtual State terminal_at(std::size_t index) const = 0;

    // Dense index over all states (non-terminal and terminal), for tabular
    // parametrizations. std::nullopt when the space is too large to index.
    [[nodiscard]] virtual std::optional<std::uint64_t> state_count() const = 0;
    [[nodiscard]] virtual std::size_t state_index(State const& s) const = 0;

    [[nodiscard]] virtual std::size_t feature_width() const = 0;
    virtual void featurize(State const& s, std::span<double> out) const = 0;

    [[nodiscard]] bool is_initial(State const& s) const { return s == initial_state(); }
};

} // namespace opgfn::env
