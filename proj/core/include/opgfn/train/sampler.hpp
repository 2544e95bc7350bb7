#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "opgfn/env/environment.hpp"
#include "opgfn/gfn/model.hpp"
#include "opgfn/gfn/trajectory.hpp"

namespace opgfn::train {

// Sampling-time distortions of the forward policy.
struct SamplingPolicy {
    double epsilon = 0.0;
    double temperature = 1.0;
};

// Index drawn from a probability vector with one uniform variate.
[[nodiscard]] std::size_t draw_categorical(std::span<double const> probs, std::mt19937_64& rng);

// Draw from a symmetric Dirichlet(alpha) of dimension `dim`.
[[nodiscard]] std::vector<double> draw_dirichlet(std::size_t dim, double alpha, std::mt19937_64& rng);

// Forward rollout from s0. The log-probability caches hold the clean
// policies (temperature 1, no epsilon). The objective is evaluated once at
// the end unless `evaluate_objective` is false, which leaves it empty.
[[nodiscard]] gfn::Trajectory sample_trajectory(env::Environment const& env, gfn::FlowModel const& model,
                                                SamplingPolicy const& policy, std::mt19937_64& rng,
                                                std::span<double const> preference = {},
                                                bool evaluate_objective = true);

// Walks backward from `terminal` to s0 under the model's backward policy
// (or uniformly when `model_backward` is false or P_B is fixed), then
// reverses the path. `objective` is attached as is.
[[nodiscard]] std::vector<gfn::Trajectory> augment_backward(env::Environment const& env, gfn::FlowModel const& model,
                                                            env::State const& terminal,
                                                            env::ObjectiveVector const& objective, std::size_t count,
                                                            bool model_backward, std::mt19937_64& rng,
                                                            std::span<double const> preference = {});

// Recomputes the clean log P_F and log P_B sums of a trajectory.
void fill_log_probs(gfn::FlowModel const& model, gfn::Trajectory& t);

} // namespace opgfn::train
