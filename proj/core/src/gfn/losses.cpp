#include "opgfn/gfn/losses.hpp"

#include <cmath>

#include "opgfn/ad/softmax.hpp"
#include "opgfn/errors.hpp"

namespace opgfn::gfn {

using ad::Var;

std::vector<std::size_t> legal_forward(env::Environment const& env, env::State const& s) {
    auto const acts = env.forward_actions(s);
    std::vector<std::size_t> out(acts.size());
    for (std::size_t i = 0; i < acts.size(); ++i) { out[i] = acts[i].index; }
    return out;
}

std::vector<std::size_t> legal_backward(env::Environment const& env, env::State const& s) {
    auto const acts = env.backward_actions(s);
    std::vector<std::size_t> out(acts.size());
    for (std::size_t i = 0; i < acts.size(); ++i) { out[i] = acts[i].index; }
    return out;
}

PathTerms record_path(ad::Tape& tape, FlowModel const& model, Trajectory const& t, bool need_flow) {
    auto const& env = model.environment();
    auto const n = t.length();
    if (t.states.size() != n + 1 || n == 0) { throw ContractViolation("malformed trajectory"); }
    PathTerms p;
    p.heads.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        HeadRequest req;
        req.forward = i < n;
        req.backward = i > 0;
        req.flow = need_flow;
        p.heads.push_back(model.record(tape, t.states[i], t.preference, req));
        if (need_flow) { p.log_flow.push_back(p.heads.back().log_flow); }
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto const& parent = t.states[i];
        auto const& child = t.states[i + 1];
        p.log_pf.push_back(ad::log_softmax_at(p.heads[i].forward, legal_forward(env, parent), t.actions[i].index));
        auto const legal_b = legal_backward(env, child);
        if (model.trainable_backward()) {
            auto const b = env.backward_inverse(parent, t.actions[i]);
            p.log_pb.push_back(ad::log_softmax_at(p.heads[i + 1].backward, legal_b, b.index));
        } else {
            p.log_pb.push_back(tape.constant(-std::log(static_cast<double>(legal_b.size()))));
        }
    }
    return p;
}

Var tb_log_reward(ad::Tape& tape, FlowModel const& model, Trajectory const& t) {
    auto const p = record_path(tape, model, t, false);
    return model.log_z(tape) + ad::sum(p.log_pf) - ad::sum(p.log_pb);
}

Var tb_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t, double log_r_target) {
    if (!std::isfinite(log_r_target)) { throw ContractViolation("TB target log-reward must be finite"); }
    return ad::square(tb_log_reward(tape, model, t) - log_r_target);
}

Var db_residual(Var log_f_parent, Var log_pf, Var log_f_child, Var log_pb) {
    return ad::square(log_f_parent + log_pf - log_f_child - log_pb);
}

namespace {

Var terminal_flow(ad::Tape& tape, PathTerms const& p, std::optional<double> log_r_target) {
    return log_r_target ? tape.constant(*log_r_target) : p.log_flow.back();
}

} // namespace

Var db_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t, std::optional<double> log_r_target) {
    auto const p = record_path(tape, model, t, true);
    auto const n = t.length();
    std::vector<Var> terms;
    terms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Var child = i + 1 == n ? terminal_flow(tape, p, log_r_target) : p.log_flow[i + 1];
        terms.push_back(db_residual(p.log_flow[i], p.log_pf[i], child, p.log_pb[i]));
    }
    return ad::sum(terms);
}

namespace {

// Clipped forward logit of `action` at `s`, read as a log edge flow.
Var log_edge_flow(HeadVars const& heads, env::ActionId action) {
    return ad::clamp(heads.forward[action.index], -ad::logit_clip, ad::logit_clip);
}

Var log_out_flow(env::Environment const& env, HeadVars const& heads, env::State const& s) {
    std::vector<Var> out;
    for (auto a : env.forward_actions(s)) { out.push_back(log_edge_flow(heads, a)); }
    return ad::log_sum_exp(out);
}

} // namespace

Var fm_state_loss(ad::Tape& tape, FlowModel const& model, env::State const& s, std::span<double const> preference) {
    auto const& env = model.environment();
    if (s.terminal || env.is_initial(s)) { throw ContractViolation("flow matching applies to interior states"); }
    HeadRequest fwd_only{true, false, false};
    std::vector<Var> in;
    for (auto b : env.backward_actions(s)) {
        auto const parent = env.unstep(s, b);
        auto const heads = model.record(tape, parent, preference, fwd_only);
        in.push_back(log_edge_flow(heads, env.forward_inverse(s, b)));
    }
    auto const heads = model.record(tape, s, preference, fwd_only);
    return ad::square(ad::log_sum_exp(in) - log_out_flow(env, heads, s));
}

Var fm_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t, std::optional<double> log_r_target) {
    auto const n = t.length();
    std::vector<Var> terms;
    for (std::size_t i = 1; i < n; ++i) { terms.push_back(fm_state_loss(tape, model, t.states[i], t.preference)); }
    if (log_r_target) {
        auto const heads = model.record(tape, t.states[n - 1], t.preference, HeadRequest{true, false, false});
        terms.push_back(ad::square(log_edge_flow(heads, t.actions[n - 1]) - *log_r_target));
    }
    if (terms.empty()) { return tape.constant(0.0); }
    return ad::sum(terms);
}

Var subtb_loss(ad::Tape& tape, FlowModel const& model, Trajectory const& t, double lambda,
               std::optional<double> log_r_target) {
    if (!(lambda > 0.0 && lambda <= 1.0)) { throw ContractViolation("subTB lambda must lie in (0, 1]"); }
    auto const p = record_path(tape, model, t, true);
    auto const n = t.length();
    std::vector<Var> flow = p.log_flow;
    flow[n] = terminal_flow(tape, p, log_r_target);
    // Prefix sums of log P_F - log P_B make every subtrajectory residual O(1).
    std::vector<Var> prefix;
    prefix.reserve(n + 1);
    prefix.push_back(tape.constant(0.0));
    for (std::size_t i = 0; i < n; ++i) { prefix.push_back(prefix.back() + p.log_pf[i] - p.log_pb[i]); }
    std::vector<Var> terms;
    double total_weight = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v <= n; ++v) {
            double const w = std::pow(lambda, static_cast<double>(v - u));
            total_weight += w;
            terms.push_back(ad::square(flow[u] + prefix[v] - prefix[u] - flow[v]) * w);
        }
    }
    return ad::sum(terms) / total_weight;
}

Var kl_to_uniform(std::span<Var const> logits, std::span<std::size_t const> legal) {
    if (legal.empty()) { throw ContractViolation("KL over an empty legal set"); }
    Var const any = logits[legal.front()];
    if (legal.size() == 1) { return any.tape->constant(0.0); }
    std::vector<Var> picked;
    for (auto i : legal) { picked.push_back(ad::clamp(logits[i], -ad::logit_clip, ad::logit_clip)); }
    Var const lse = ad::log_sum_exp(picked);
    std::vector<Var> terms;
    for (auto const& x : picked) {
        Var const lp = x - lse;
        terms.push_back(ad::exp(lp) * lp);
    }
    return ad::sum(terms) + std::log(static_cast<double>(legal.size()));
}

Var kl_reg(ad::Tape& tape, FlowModel const& model, Trajectory const& t) {
    if (!model.trainable_backward()) { throw ContractViolation("KL regularization needs a trainable backward policy"); }
    auto const& env = model.environment();
    auto const n = t.length();
    std::vector<Var> terms;
    for (std::size_t i = 1; i <= n; ++i) {
        auto const heads = model.record(tape, t.states[i], t.preference, HeadRequest{false, true, false});
        terms.push_back(kl_to_uniform(heads.backward, legal_backward(env, t.states[i])));
    }
    return ad::sum(terms) / static_cast<double>(n);
}

Var learned_log_reward(ad::Tape& tape, FlowModel const& model, Trajectory const& t, Criterion criterion) {
    switch (criterion) {
    case Criterion::tb: return tb_log_reward(tape, model, t);
    case Criterion::fm: {
        auto const n = t.length();
        auto const heads = model.record(tape, t.states[n - 1], t.preference, HeadRequest{true, false, false});
        return log_edge_flow(heads, t.actions[n - 1]);
    }
    default: return model.record(tape, t.terminal(), t.preference, HeadRequest{false, false, true}).log_flow;
    }
}

double learned_log_reward_value(FlowModel const& model, Trajectory const& t, Criterion criterion) {
    auto const& env = model.environment();
    auto const n = t.length();
    if (criterion == Criterion::tb) {
        double total = model.log_z();
        for (std::size_t i = 0; i < n; ++i) {
            auto const parent = model.evaluate(t.states[i], t.preference);
            auto const legal_f = legal_forward(env, t.states[i]);
            total += ad::log_softmax_masked(parent.forward, legal_f)[t.actions[i].index];
            auto const legal_b = legal_backward(env, t.states[i + 1]);
            if (model.trainable_backward()) {
                auto const child = model.evaluate(t.states[i + 1], t.preference);
                auto const b = env.backward_inverse(t.states[i], t.actions[i]);
                total -= ad::log_softmax_masked(child.backward, legal_b)[b.index];
            } else {
                total += std::log(static_cast<double>(legal_b.size()));
            }
        }
        return total;
    }
    if (criterion == Criterion::fm) {
        auto const heads = model.evaluate(t.states[n - 1], t.preference);
        return std::clamp(heads.forward[t.actions[n - 1].index], -ad::logit_clip, ad::logit_clip);
    }
    return model.evaluate(t.terminal(), t.preference).log_flow;
}

} // namespace opgfn::gfn
