#include "opgfn/metrics/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opgfn/ad/softmax.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/gfn/exact.hpp"
#include "opgfn/metrics/pareto.hpp"

namespace opgfn::metrics {

namespace {

std::size_t terminal_total(env::Environment const& env) {
    auto const n = env.terminal_count();
    if (!env.enumerable() || !n) {
        throw CapabilityError("terminal space exceeds the enumeration cap; use sampling-based evaluation");
    }
    return static_cast<std::size_t>(*n);
}

bool same_level(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

} // namespace

std::vector<std::size_t> maximal_terminals(env::Environment const& env) {
    auto const terminals = env.enumerate_terminals();
    Points u;
    u.reserve(terminals.size());
    for (auto const& x : terminals) { u.push_back(env.objective(x)); }
    if (env.objective_dim() > 1) { return pareto_indices(u); }
    double best = -std::numeric_limits<double>::infinity();
    for (auto const& v : u) { best = std::max(best, v[0]); }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (same_level(u[i][0], best)) { out.push_back(i); }
    }
    return out;
}

std::vector<double> target_distribution(env::Environment const& env, double beta) {
    if (env.objective_dim() != 1) { throw ContractViolation("target distribution needs a single objective"); }
    std::vector<double> log_r;
    env.for_each_terminal([&](env::State const& x) {
        double const u = env.objective(x)[0];
        if (!(u > 0.0)) { throw ContractViolation("target distribution needs positive rewards"); }
        log_r.push_back(beta * std::log(u));
    });
    double const m = *std::max_element(log_r.begin(), log_r.end());
    double z = 0.0;
    for (double v : log_r) { z += std::exp(v - m); }
    std::vector<double> out(log_r.size());
    for (std::size_t i = 0; i < out.size(); ++i) { out[i] = std::exp(log_r[i] - m) / z; }
    return out;
}

ExplorationRatios exploration_ratios(std::span<std::size_t const> visits, std::vector<bool> const& is_maximal,
                                     std::size_t n_terminals, std::size_t recent) {
    if (n_terminals == 0 || is_maximal.size() != n_terminals || recent == 0) {
        throw ContractViolation("exploration ratios need a non-empty terminal set and window");
    }
    std::vector<bool> seen(n_terminals, false);
    std::size_t distinct = 0;
    std::size_t distinct_max = 0;
    for (auto v : visits) {
        if (v >= n_terminals) { throw ContractViolation("visit index out of range"); }
        if (!seen[v]) {
            seen[v] = true;
            ++distinct;
            if (is_maximal[v]) { ++distinct_max; }
        }
    }
    auto const n_max = static_cast<std::size_t>(std::count(is_maximal.begin(), is_maximal.end(), true));
    ExplorationRatios r;
    r.r1 = static_cast<double>(distinct) / static_cast<double>(n_terminals);
    r.r2 = n_max == 0 ? 0.0 : static_cast<double>(distinct_max) / static_cast<double>(n_max);
    auto const start = visits.size() > recent ? visits.size() - recent : 0;
    std::size_t hits = 0;
    std::vector<bool> recent_seen(n_terminals, false);
    for (auto i = start; i < visits.size(); ++i) {
        auto const v = visits[i];
        if (!is_maximal[v]) { continue; }
        ++hits;
        if (!recent_seen[v]) {
            recent_seen[v] = true;
            ++r.distinct_max_recent;
        }
    }
    r.r3 = static_cast<double>(hits) / static_cast<double>(recent);
    return r;
}

double l1_to_target(std::span<std::size_t const> visits, std::span<double const> target) {
    if (visits.empty()) { throw ContractViolation("L1 error needs at least one visit"); }
    std::vector<double> empirical(target.size(), 0.0);
    for (auto v : visits) {
        if (v >= target.size()) { throw ContractViolation("visit index out of range"); }
        empirical[v] += 1.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        total += std::abs(empirical[i] / static_cast<double>(visits.size()) - target[i]);
    }
    return total;
}

VisitTracker::VisitTracker(env::Environment const& env, double beta, std::size_t window, std::size_t recent)
    : env_(&env), n_terminals_(terminal_total(env)), window_size_(window), recent_(recent),
      is_maximal_(n_terminals_, false), seen_(n_terminals_, false) {
    if (window == 0 || recent == 0) { throw ConfigError("visit windows must be positive"); }
    for (auto i : maximal_terminals(env)) { is_maximal_[i] = true; }
    maximal_count_ = static_cast<std::size_t>(std::count(is_maximal_.begin(), is_maximal_.end(), true));
    if (env.objective_dim() == 1) { target_ = target_distribution(env, beta); }
}

void VisitTracker::record(env::State const& terminal) {
    auto const i = env_->terminal_index(terminal);
    if (!seen_[i]) {
        seen_[i] = true;
        ++distinct_;
        if (is_maximal_[i]) { ++distinct_max_; }
    }
    window_.push_back(i);
    if (window_.size() > std::max(window_size_, recent_)) { window_.pop_front(); }
    ++total_;
}

ExplorationRatios VisitTracker::ratios() const {
    ExplorationRatios r;
    r.r1 = static_cast<double>(distinct_) / static_cast<double>(n_terminals_);
    r.r2 = maximal_count_ == 0 ? 0.0 : static_cast<double>(distinct_max_) / static_cast<double>(maximal_count_);
    auto const start = window_.size() > recent_ ? window_.size() - recent_ : 0;
    std::size_t hits = 0;
    std::vector<std::size_t> found;
    for (auto i = start; i < window_.size(); ++i) {
        auto const v = window_[i];
        if (!is_maximal_[v]) { continue; }
        ++hits;
        found.push_back(v);
    }
    std::sort(found.begin(), found.end());
    r.distinct_max_recent = static_cast<std::size_t>(std::unique(found.begin(), found.end()) - found.begin());
    r.r3 = static_cast<double>(hits) / static_cast<double>(recent_);
    return r;
}

double VisitTracker::l1() const {
    if (target_.empty() || window_.empty()) { return std::numeric_limits<double>::quiet_NaN(); }
    auto const start = window_.size() > window_size_ ? window_.size() - window_size_ : 0;
    std::vector<std::size_t> tail(window_.begin() + static_cast<std::ptrdiff_t>(start), window_.end());
    return l1_to_target(tail, target_);
}

std::vector<LandscapeRow> reward_landscape(gfn::FlowModel const& model, gfn::Criterion criterion) {
    auto const& env = model.environment();
    if (env.objective_dim() != 1) { throw ContractViolation("reward landscape needs a single objective"); }
    auto const terminals = env.enumerate_terminals();
    std::vector<double> log_r(terminals.size());
    if (criterion == gfn::Criterion::tb) {
        auto const p = gfn::terminal_distribution(model);
        for (std::size_t i = 0; i < p.size(); ++i) { log_r[i] = model.log_z() + std::log(p[i]); }
    } else {
        for (std::size_t i = 0; i < terminals.size(); ++i) {
            auto const& x = terminals[i];
            if (criterion == gfn::Criterion::fm) {
                auto const b = env.backward_actions(x).front();
                auto const parent = env.unstep(x, b);
                auto const a = env.forward_inverse(x, b);
                log_r[i] = std::clamp(model.evaluate(parent).forward[a.index], -ad::logit_clip, ad::logit_clip);
            } else {
                log_r[i] = model.evaluate(x).log_flow;
            }
        }
    }
    std::vector<std::pair<double, double>> rows(terminals.size());
    for (std::size_t i = 0; i < terminals.size(); ++i) { rows[i] = {env.objective(terminals[i])[0], log_r[i]}; }
    std::sort(rows.begin(), rows.end());
    std::vector<LandscapeRow> out;
    for (auto const& [u, lr] : rows) {
        if (out.empty() || !same_level(u, out.back().u)) { out.push_back(LandscapeRow{u, 0.0, 0}); }
        auto& row = out.back();
        row.mean_log_reward += (lr - row.mean_log_reward) / static_cast<double>(++row.count);
    }
    return out;
}

} // namespace opgfn::metrics
