#include "opgfn/gfn/composite.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "opgfn/errors.hpp"
#include "opgfn/gfn/losses.hpp"
#include "opgfn/gfn/order_preserving.hpp"

namespace opgfn::gfn {

using ad::Var;

double scalarize_preference(std::span<double const> u, std::span<double const> w) {
    if (u.size() != w.size()) { throw ContractViolation("preference and objective dimensions differ"); }
    double total = 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < -1e-9) { throw ContractViolation("preference has a negative weight"); }
        total += w[i];
        dot += w[i] * u[i];
    }
    if (std::abs(total - 1.0) > 1e-9) { throw ContractViolation("preference weights do not sum to one"); }
    return dot;
}

double log_reward_target(Trajectory const& t, LossConfig const& config) {
    double r = 0.0;
    if (config.preference == Preference::fixed) {
        r = scalarize_preference(t.objective, config.preference_weights);
    } else if (config.preference == Preference::dirichlet) {
        r = scalarize_preference(t.objective, t.preference);
    } else {
        if (t.objective.size() != 1) { throw ContractViolation("scalar target needs a single objective"); }
        r = t.objective.front();
    }
    return config.beta * std::log(std::max(r, reward_floor));
}

namespace {

Var mdp_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t, LossConfig const& config,
             std::optional<double> target) {
    switch (config.criterion) {
    case Criterion::tb: return tb_loss(tape, model, t, *target);
    case Criterion::db: return db_loss(tape, model, t, target);
    case Criterion::fm: return fm_loss(tape, model, t, target);
    case Criterion::subtb: return subtb_loss(tape, model, t, config.lambda_subtb, target);
    }
    throw ContractViolation("unknown criterion");
}

} // namespace

LossBreakdown composite_loss(ad::Tape& tape, FlowModel const& model, std::span<Trajectory const> batch,
                             LossConfig const& config) {
    if (batch.empty()) { throw ContractViolation("loss on an empty batch"); }
    auto const dim = batch.front().objective.size();
    validate(config, dim);
    auto const b = static_cast<double>(batch.size());
    LossBreakdown out;
    std::vector<Var> parts;

    if (config.order_preserving) {
        if (config.criterion != Criterion::tb) {
            std::vector<Var> mdp;
            for (auto const& t : batch) { mdp.push_back(mdp_loss(tape, model, t, config, std::nullopt)); }
            Var const mean = ad::sum(mdp) / b;
            out.mdp = mean.value();
            parts.push_back(mean);
        }
        std::vector<Var> log_rhat;
        for (auto const& t : batch) { log_rhat.push_back(learned_log_reward(tape, model, t, config.criterion)); }
        auto const pairing = resolve_pairing(config.pairing, dim);
        Var op = tape.constant(0.0);
        if (pairing == Pairing::pareto_batch) {
            std::vector<env::ObjectiveVector> u;
            for (auto const& t : batch) { u.push_back(t.objective); }
            op = op_loss_pareto(log_rhat, u);
        } else {
            std::vector<double> u;
            for (auto const& t : batch) { u.push_back(t.objective.front()); }
            auto const pairs = make_pairs(u, pairing);
            op = op_loss_pairwise(log_rhat, u, pairs);
            if (!pairs.empty()) { op = op / static_cast<double>(pairs.size()); }
        }
        out.op = op.value();
        parts.push_back(config.criterion == Criterion::tb ? op : op * config.lambda_op);
    } else {
        std::vector<Var> mdp;
        for (auto const& t : batch) { mdp.push_back(mdp_loss(tape, model, t, config, log_reward_target(t, config))); }
        Var const mean = ad::sum(mdp) / b;
        out.mdp = mean.value();
        parts.push_back(mean);
    }

    if (config.kl_active()) {
        std::vector<Var> kl;
        for (auto const& t : batch) { kl.push_back(kl_reg(tape, model, t)); }
        Var const mean = ad::sum(kl) / b;
        out.kl = mean.value();
        parts.push_back(mean * config.lambda_kl);
    }
    out.total = ad::sum(parts);
    return out;
}

} // namespace opgfn::gfn
