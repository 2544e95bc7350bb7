#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "opgfn/env/environment.hpp"
#include "opgfn/gfn/model.hpp"

namespace opgfn::gfn {

// States reachable from s0 grouped by the number of forward steps. Both
// environment families are graded (every path to a state has the same
// length); ContractViolation otherwise. CapabilityError past `cap` states.
[[nodiscard]] std::vector<std::vector<env::State>> state_layers(env::Environment const& env, std::uint64_t cap);
[[nodiscard]] std::vector<std::vector<env::State>> state_layers(env::Environment const& env);

// Marginal probability of each terminal (by terminal_index) under the
// forward policy with the given sampling distortions.
[[nodiscard]] std::vector<double> terminal_distribution(FlowModel const& model, double epsilon = 0.0,
                                                        double temperature = 1.0,
                                                        std::span<double const> preference = {});

// Mean of KL(P_B(.|s) || uniform) over every reachable non-initial state.
// Zero for a fixed uniform backward policy.
[[nodiscard]] double mean_backward_kl(FlowModel const& model, std::span<double const> preference = {});

} // namespace opgfn::gfn
