#pragma once

#include <string>
#include <vector>

#include "opgfn/env/environment.hpp"

namespace opgfn::env {

// D-dimensional grid of side H. Forward action d < D increments coordinate d,
// action D is the terminal action; backward action d decrements coordinate d
// and backward action D undoes termination.
class HyperGrid final : public Environment {
public:
    HyperGrid(int dim, int side, double r0, std::vector<std::string> objectives,
              EnvKind kind = EnvKind::hypergrid);

    [[nodiscard]] EnvKind kind() const override { return kind_; }
    [[nodiscard]] std::string describe() const override;

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int side() const { return side_; }
    [[nodiscard]] double r0() const { return r0_; }

    [[nodiscard]] State initial_state() const override;
    [[nodiscard]] std::size_t num_forward_actions() const override;
    [[nodiscard]] std::size_t num_backward_actions() const override;
    [[nodiscard]] std::vector<ActionId> forward_actions(State const& s) const override;
    [[nodiscard]] std::vector<ActionId> backward_actions(State const& s) const override;
    [[nodiscard]] State step(State const& s, ActionId forward) const override;
    [[nodiscard]] State unstep(State const& s, ActionId backward) const override;
    [[nodiscard]] ActionId backward_inverse(State const& parent, ActionId forward) const override;
    [[nodiscard]] ActionId forward_inverse(State const& child, ActionId backward) const override;

    [[nodiscard]] std::size_t objective_dim() const override { return objectives_.size(); }
    [[nodiscard]] ObjectiveVector objective(State const& terminal) const override;
    [[nodiscard]] std::vector<std::string> objective_names() const override { return objectives_; }
    // Coordinates mapped to [0, 1] via s / (H - 1).
    [[nodiscard]] std::vector<double> unit_coordinates(State const& s) const;

    [[nodiscard]] std::size_t max_trajectory_length() const override;
    [[nodiscard]] std::optional<std::uint64_t> terminal_count() const override;
    [[nodiscard]] std::size_t terminal_index(State const& terminal) const override;
    [[nodiscard]] State terminal_at(std::size_t index) const override;
    [[nodiscard]] std::optional<std::uint64_t> state_count() const override;
    [[nodiscard]] std::size_t state_index(State const& s) const override;
    [[nodiscard]] std::size_t feature_width() const override;
    void featurize(State const& s, std::span<double> out) const override;

private:
    void check_state(State const& s) const;
    [[nodiscard]] std::size_t linear_index(State const& s) const;

    int dim_;
    int side_;
    double r0_;
    std::vector<std::string> objectives_;
    EnvKind kind_;
    std::uint64_t cells_ = 0;
};

} // namespace opgfn::env
