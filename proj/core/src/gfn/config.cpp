#include "opgfn/gfn/config.hpp"

#include <cmath>

#include "opgfn/errors.hpp"

namespace opgfn::gfn {

std::string to_string(Criterion c) {
    switch (c) {
    case Criterion::fm: return "fm";
    case Criterion::db: return "db";
    case Criterion::tb: return "tb";
    case Criterion::subtb: return "subtb";
    }
    return "?";
}

std::string to_string(BackwardMode m) {
    switch (m) {
    case BackwardMode::uniform: return "uniform";
    case BackwardMode::trainable: return "trainable";
    case BackwardMode::trainable_kl: return "trainable-kl";
    }
    return "?";
}

std::string to_string(Pairing p) {
    switch (p) {
    case Pairing::automatic: return "auto";
    case Pairing::sorted_neighbors: return "sorted-neighbors";
    case Pairing::all_pairs: return "all-pairs";
    case Pairing::pareto_batch: return "pareto-batch";
    }
    return "?";
}

std::string to_string(Preference p) {
    switch (p) {
    case Preference::none: return "none";
    case Preference::fixed: return "fixed";
    case Preference::dirichlet: return "dirichlet";
    }
    return "?";
}

Criterion parse_criterion(std::string const& text) {
    if (text == "fm") { return Criterion::fm; }
    if (text == "db") { return Criterion::db; }
    if (text == "tb") { return Criterion::tb; }
    if (text == "subtb") { return Criterion::subtb; }
    throw ConfigError("loss.criterion: unknown criterion '" + text + "'");
}

BackwardMode parse_backward_mode(std::string const& text) {
    if (text == "uniform") { return BackwardMode::uniform; }
    if (text == "trainable") { return BackwardMode::trainable; }
    if (text == "trainable-kl") { return BackwardMode::trainable_kl; }
    throw ConfigError("loss.backward: unknown backward mode '" + text + "'");
}

Pairing parse_pairing(std::string const& text) {
    if (text == "auto") { return Pairing::automatic; }
    if (text == "sorted-neighbors") { return Pairing::sorted_neighbors; }
    if (text == "all-pairs") { return Pairing::all_pairs; }
    if (text == "pareto-batch") { return Pairing::pareto_batch; }
    throw ConfigError("loss.pairing: unknown pairing '" + text + "'");
}

Preference parse_preference(std::string const& text) {
    if (text == "none") { return Preference::none; }
    if (text == "fixed") { return Preference::fixed; }
    if (text == "dirichlet") { return Preference::dirichlet; }
    throw ConfigError("loss.preference: unknown preference mode '" + text + "'");
}

Pairing resolve_pairing(Pairing p, std::size_t objective_dim) {
    if (p != Pairing::automatic) { return p; }
    return objective_dim == 1 ? Pairing::sorted_neighbors : Pairing::pareto_batch;
}

void validate(LossConfig const& c, std::size_t objective_dim) {
    if (objective_dim == 0) { throw ConfigError("env.objectives: at least one objective is required"); }
    if (!(c.lambda_op >= 0.0) || !std::isfinite(c.lambda_op)) { throw ConfigError("loss.lambda_op must be >= 0"); }
    if (!(c.lambda_kl >= 0.0) || !std::isfinite(c.lambda_kl)) { throw ConfigError("loss.lambda_kl must be >= 0"); }
    if (!(c.lambda_subtb > 0.0 && c.lambda_subtb <= 1.0)) { throw ConfigError("loss.lambda_subtb must lie in (0, 1]"); }
    if (!(c.beta >= 1.0) || !std::isfinite(c.beta)) { throw ConfigError("loss.beta must be >= 1"); }
    if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) { throw ConfigError("loss.epsilon must lie in [0, 1)"); }
    if (!(c.temperature > 0.0) || !std::isfinite(c.temperature)) { throw ConfigError("loss.temperature must be > 0"); }
    if (c.criterion == Criterion::fm && c.trainable_backward()) {
        throw ConfigError("loss.backward: flow matching has no backward policy; use 'uniform'");
    }
    if (c.order_preserving) {
        auto const p = resolve_pairing(c.pairing, objective_dim);
        if (objective_dim > 1 && p != Pairing::pareto_batch) {
            throw ConfigError("loss.pairing: pairwise order preservation requires a single objective");
        }
        if (c.preference != Preference::none) {
            throw ConfigError("loss.preference: preference conditioning applies only without order preservation");
        }
    } else {
        if (objective_dim > 1 && c.preference == Preference::none) {
            throw ConfigError("loss.preference: multiple objectives without order preservation need a scalarization");
        }
    }
    if (c.preference == Preference::fixed) {
        if (c.preference_weights.size() != objective_dim) {
            throw ConfigError("loss.preference_weights must have one weight per objective");
        }
        double total = 0.0;
        for (double w : c.preference_weights) {
            if (!(w >= 0.0)) { throw ConfigError("loss.preference_weights must be nonnegative"); }
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) { throw ConfigError("loss.preference_weights must sum to 1"); }
    }
    if (c.preference == Preference::dirichlet && !(c.dirichlet_alpha > 0.0)) {
        throw ConfigError("loss.dirichlet_alpha must be > 0");
    }
}

} // namespace opgfn::gfn
