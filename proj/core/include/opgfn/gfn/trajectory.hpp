#pragma once

#include <vector>

#include "opgfn/env/environment.hpp"

namespace opgfn::gfn {

// A complete path s0 -> ... -> x with n actions and n + 1 states.
struct Trajectory {
    std::vector<env::State> states;
    std::vector<env::ActionId> actions;
    env::ObjectiveVector objective;
    // Preference the sampler was conditioned on; empty when unconditioned.
    std::vector<double> preference;
    // Sums of log P_F and log P_B along the path under the clean policies.
    double log_pf = 0.0;
    double log_pb = 0.0;

    [[nodiscard]] std::size_t length() const { return actions.size(); }
    [[nodiscard]] env::State const& terminal() const { return states.back(); }
};

// Throws ContractViolation when states and actions are inconsistent with the
// environment or the path does not end in a terminal state.
void check_trajectory(env::Environment const& env, Trajectory const& t);

} // namespace opgfn::gfn
