#include "opgfn/gfn/exact.hpp"

#include <cmath>
#include <unordered_map>

#include "opgfn/ad/softmax.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/gfn/losses.hpp"

namespace opgfn::gfn {

std::vector<std::vector<env::State>> state_layers(env::Environment const& env, std::uint64_t cap) {
    std::unordered_map<env::State, std::size_t, env::StateHash> depth;
    std::vector<std::vector<env::State>> layers{{env.initial_state()}};
    depth.emplace(env.initial_state(), 0);
    while (true) {
        std::vector<env::State> next;
        std::size_t const d = layers.size();
        for (auto const& s : layers.back()) {
            if (s.terminal) { continue; }
            for (auto a : env.forward_actions(s)) {
                auto child = env.step(s, a);
                auto [it, inserted] = depth.emplace(child, d);
                if (!inserted) {
                    if (it->second != d) { throw ContractViolation("state graph is not graded by path length"); }
                    continue;
                }
                if (depth.size() > cap) {
                    throw CapabilityError("state space exceeds the enumeration cap; use sampling-based evaluation");
                }
                next.push_back(std::move(child));
            }
        }
        if (next.empty()) { break; }
        layers.push_back(std::move(next));
    }
    return layers;
}

std::vector<std::vector<env::State>> state_layers(env::Environment const& env) {
    return state_layers(env, env.enumeration_cap());
}

std::vector<double> terminal_distribution(FlowModel const& model, double epsilon, double temperature,
                                          std::span<double const> preference) {
    auto const& env = model.environment();
    auto const count = env.terminal_count();
    if (!env.enumerable() || !count) {
        throw CapabilityError("terminal space exceeds the enumeration cap; use sampling-based evaluation");
    }
    std::vector<double> out(static_cast<std::size_t>(*count), 0.0);
    std::unordered_map<env::State, double, env::StateHash> mass{{env.initial_state(), 1.0}};
    for (auto const& layer : state_layers(env)) {
        std::unordered_map<env::State, double, env::StateHash> next;
        for (auto const& s : layer) {
            auto const it = mass.find(s);
            if (it == mass.end()) { continue; }
            double const p = it->second;
            if (s.terminal) {
                out[env.terminal_index(s)] += p;
                continue;
            }
            auto const legal = legal_forward(env, s);
            auto const probs = ad::softmax_masked(model.evaluate(s, preference).forward, legal, temperature, epsilon);
            for (auto a : legal) { next[env.step(s, env::ActionId{static_cast<std::uint32_t>(a)})] += p * probs[a]; }
        }
        mass = std::move(next);
    }
    return out;
}

double mean_backward_kl(FlowModel const& model, std::span<double const> preference) {
    if (!model.trainable_backward()) { return 0.0; }
    auto const& env = model.environment();
    double total = 0.0;
    std::size_t n = 0;
    auto const layers = state_layers(env);
    for (std::size_t d = 1; d < layers.size(); ++d) {
        for (auto const& s : layers[d]) {
            auto const legal = legal_backward(env, s);
            auto const logp = ad::log_softmax_masked(model.evaluate(s, preference).backward, legal);
            double const log_u = -std::log(static_cast<double>(legal.size()));
            double kl = 0.0;
            for (auto b : legal) { kl += std::exp(logp[b]) * (logp[b] - log_u); }
            total += kl;
            ++n;
        }
    }
    return n == 0 ? 0.0 : total / static_cast<double>(n);
}

} // namespace opgfn::gfn
