#pragma once

#include <span>
#include <vector>

#include "opgfn/ad/tape.hpp"
#include "opgfn/gfn/config.hpp"
#include "opgfn/gfn/model.hpp"
#include "opgfn/gfn/trajectory.hpp"

namespace opgfn::gfn {

// Targets never go below log of this floor.
inline constexpr double reward_floor = 1e-12;

// w^T u for w on the probability simplex (tolerance 1e-9).
[[nodiscard]] double scalarize_preference(std::span<double const> u, std::span<double const> w);

// beta * log r(x), where r is u (scalar objective) or the scalarization of u
// by the trajectory's preference or the fixed weights.
[[nodiscard]] double log_reward_target(Trajectory const& t, LossConfig const& config);

struct LossBreakdown {
    ad::Var total;
    double mdp = 0.0;
    double op = 0.0;
    double kl = 0.0;
};

// TB with order preservation: the order-preserving loss on R_hat alone.
// Other criteria with order preservation: mean constraint loss plus
// lambda_op times the order-preserving loss on R_hat = F(x).
// Without order preservation: mean constraint loss against log targets.
// lambda_kl times the mean KL regularizer is added when enabled.
[[nodiscard]] LossBreakdown composite_loss(ad::Tape& tape, FlowModel const& model, std::span<Trajectory const> batch,
                                           LossConfig const& config);

} // namespace opgfn::gfn
