#include "opgfn/train/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "opgfn/ad/softmax.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/gfn/losses.hpp"
#include "opgfn/util/hash.hpp"

namespace opgfn::train {

std::size_t draw_categorical(std::span<double const> probs, std::mt19937_64& rng) {
    double const u = util::unit_interval(rng());
    double acc = 0.0;
    std::size_t last = probs.size();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) { continue; }
        acc += probs[i];
        last = i;
        if (u < acc) { return i; }
    }
    if (last == probs.size()) { throw ContractViolation("categorical draw from an all-zero vector"); }
    return last;
}

std::vector<double> draw_dirichlet(std::size_t dim, double alpha, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> w(dim);
    double total = 0.0;
    for (auto& x : w) {
        x = gamma(rng);
        total += x;
    }
    if (!(total > 0.0)) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(dim));
        return w;
    }
    for (auto& x : w) { x /= total; }
    return w;
}

void fill_log_probs(gfn::FlowModel const& model, gfn::Trajectory& t) {
    auto const& env = model.environment();
    t.log_pf = 0.0;
    t.log_pb = 0.0;
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
        auto const heads = model.evaluate(t.states[i], t.preference);
        t.log_pf += ad::log_softmax_masked(heads.forward, gfn::legal_forward(env, t.states[i]))[t.actions[i].index];
        auto const legal_b = gfn::legal_backward(env, t.states[i + 1]);
        if (model.trainable_backward()) {
            auto const child = model.evaluate(t.states[i + 1], t.preference);
            auto const b = env.backward_inverse(t.states[i], t.actions[i]);
            t.log_pb += ad::log_softmax_masked(child.backward, legal_b)[b.index];
        } else {
            t.log_pb -= std::log(static_cast<double>(legal_b.size()));
        }
    }
}

gfn::Trajectory sample_trajectory(env::Environment const& env, gfn::FlowModel const& model,
                                  SamplingPolicy const& policy, std::mt19937_64& rng,
                                  std::span<double const> preference, bool evaluate_objective) {
    gfn::Trajectory t;
    t.preference.assign(preference.begin(), preference.end());
    t.states.push_back(env.initial_state());
    bool const clean = policy.epsilon == 0.0 && policy.temperature == 1.0;
    while (!t.states.back().terminal) {
        auto const& s = t.states.back();
        auto const legal = gfn::legal_forward(env, s);
        std::size_t action = 0;
        if (policy.epsilon >= 1.0) {
            action = legal[static_cast<std::size_t>(util::unit_interval(rng()) * static_cast<double>(legal.size()))];
            auto const heads = model.evaluate(s, t.preference);
            t.log_pf += ad::log_softmax_masked(heads.forward, legal)[action];
        } else {
            auto const heads = model.evaluate(s, t.preference);
            auto const probs = ad::softmax_masked(heads.forward, legal, policy.temperature, policy.epsilon);
            action = draw_categorical(probs, rng);
            t.log_pf += clean ? std::log(probs[action]) : ad::log_softmax_masked(heads.forward, legal)[action];
        }
        t.actions.push_back(env::ActionId{static_cast<std::uint32_t>(action)});
        t.states.push_back(env.step(s, t.actions.back()));
        auto const legal_b = gfn::legal_backward(env, t.states.back());
        if (model.trainable_backward()) {
            auto const child = model.evaluate(t.states.back(), t.preference);
            auto const b = env.backward_inverse(s, t.actions.back());
            t.log_pb += ad::log_softmax_masked(child.backward, legal_b)[b.index];
        } else {
            t.log_pb -= std::log(static_cast<double>(legal_b.size()));
        }
    }
    if (evaluate_objective) { t.objective = env.objective(t.states.back()); }
    return t;
}

std::vector<gfn::Trajectory> augment_backward(env::Environment const& env, gfn::FlowModel const& model,
                                              env::State const& terminal, env::ObjectiveVector const& objective,
                                              std::size_t count, bool model_backward, std::mt19937_64& rng,
                                              std::span<double const> preference) {
    if (!terminal.terminal) { throw ContractViolation("backward augmentation starts from a terminal state"); }
    bool const use_model = model_backward && model.trainable_backward();
    std::vector<gfn::Trajectory> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<env::State> rev{terminal};
        std::vector<env::ActionId> rev_actions;
        while (!env.is_initial(rev.back())) {
            auto const& s = rev.back();
            auto const legal = gfn::legal_backward(env, s);
            std::size_t b = 0;
            if (use_model && legal.size() > 1) {
                auto const heads = model.evaluate(s, preference);
                b = draw_categorical(ad::softmax_masked(heads.backward, legal), rng);
            } else {
                b = legal[static_cast<std::size_t>(util::unit_interval(rng()) * static_cast<double>(legal.size()))];
            }
            env::ActionId const back{static_cast<std::uint32_t>(b)};
            rev_actions.push_back(env.forward_inverse(s, back));
            rev.push_back(env.unstep(s, back));
        }
        gfn::Trajectory t;
        t.states.assign(rev.rbegin(), rev.rend());
        t.actions.assign(rev_actions.rbegin(), rev_actions.rend());
        t.objective = objective;
        t.preference.assign(preference.begin(), preference.end());
        fill_log_probs(model, t);
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace opgfn::train
