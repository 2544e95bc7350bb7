#pragma once

#include <optional>
#include <span>
#include <vector>

#include "opgfn/ad/tape.hpp"
#include "opgfn/gfn/config.hpp"
#include "opgfn/gfn/model.hpp"
#include "opgfn/gfn/trajectory.hpp"

namespace opgfn::gfn {

// Per-step tape quantities along one trajectory: log_pf[t] and log_pb[t]
// belong to the transition s_t -> s_{t+1}; log_flow has one entry per state.
struct PathTerms {
    std::vector<ad::Var> log_pf;
    std::vector<ad::Var> log_pb;
    std::vector<ad::Var> log_flow;
    std::vector<HeadVars> heads;
};

[[nodiscard]] PathTerms record_path(ad::Tape& tape, FlowModel const& model, Trajectory const& t, bool need_flow);

// log Z + sum log P_F - sum log P_B along the trajectory.
[[nodiscard]] ad::Var tb_log_reward(ad::Tape& tape, FlowModel const& model, Trajectory const& t);

[[nodiscard]] ad::Var tb_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t, double log_r_target);

// Squared residual of F(s) P_F(s'|s) = F(s') P_B(s|s') in log space.
[[nodiscard]] ad::Var db_residual(ad::Var log_f_parent, ad::Var log_pf, ad::Var log_f_child, ad::Var log_pb);

// Sums over every transition of the trajectory. The terminal flow is
// `log_r_target` when given and the flow head otherwise.
[[nodiscard]] ad::Var db_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t,
                              std::optional<double> log_r_target);

// Flow matching at one non-initial, non-terminal state: log in-flow minus
// log out-flow, squared. Edge flows are the exponentiated forward logits.
[[nodiscard]] ad::Var fm_state_loss(ad::Tape& tape, FlowModel const& model, env::State const& s,
                                    std::span<double const> preference = {});

// Sum of fm_state_loss over interior states; with a target, adds the squared
// gap between the terminal edge flow and the target.
[[nodiscard]] ad::Var fm_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t,
                              std::optional<double> log_r_target);

// Every subtrajectory 0 <= u < v <= n weighted by lambda^(v-u), weights
// normalized to sum to one.
[[nodiscard]] ad::Var subtb_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t, double lambda,
                                 std::optional<double> log_r_target);

// KL(softmax(logits over legal) || uniform over legal).
[[nodiscard]] ad::Var kl_to_uniform(std::span<ad::Var const> logits, std::span<std::size_t const> legal);

// (1/n) sum_t KL(P_B(.|s_t) || U_B(.|s_t)) over s_1..s_n.
[[nodiscard]] ad::Var kl_reg(ad::Tape& tape, FlowModel const& model, Trajectory const& t);

// Learned reward log R_hat(x): the trajectory-balance estimate for TB, the
// terminal state flow for DB and subTB, the terminal edge flow for FM.
[[nodiscard]] ad::Var learned_log_reward(ad::Tape& tape, FlowModel const& model, Trajectory const& t,
                                         Criterion criterion);
[[nodiscard]] double learned_log_reward_value(FlowModel const& model, Trajectory const& t, Criterion criterion);

// Indices of legal actions, as plain integers for the softmax helpers.
[[nodiscard]] std::vector<std::size_t> legal_forward(env::Environment const& env, env::State const& s);
[[nodiscard]] std::vector<std::size_t> legal_backward(env::Environment const& env, env::State const& s);

} // namespace opgfn::gfn
