#include "opgfn/gfn/order_preserving.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opgfn/errors.hpp"

namespace opgfn::gfn {

using ad::Var;

std::vector<bool> pareto_membership(std::span<env::ObjectiveVector const> u) {
    std::vector<bool> y(u.size(), true);
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = 0; j < u.size() && y[i]; ++j) {
            if (j != i && env::strictly_dominated(u[i], u[j])) { y[i] = false; }
        }
    }
    return y;
}

Var op_loss_pareto(std::span<Var const> log_rhat, std::span<env::ObjectiveVector const> u) {
    if (log_rhat.size() < 2) { throw ContractViolation("order-preserving loss needs a batch of at least two"); }
    if (log_rhat.size() != u.size()) { throw ContractViolation("log-reward and objective batches differ in size"); }
    auto const y = pareto_membership(u);
    std::vector<Var> front;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i]) { front.push_back(log_rhat[i]); }
    }
    auto const k = static_cast<double>(front.size());
    // sum_{x in P} (1/k) (log(1/k) - log R(x) + logsumexp_X log R)
    return ad::log_sum_exp(log_rhat) - ad::sum(front) / k - std::log(k);
}

double op_loss_pareto_value(std::span<double const> log_rhat, std::span<env::ObjectiveVector const> u) {
    ad::ParamStore empty;
    ad::Tape tape(empty);
    std::vector<Var> v;
    for (double x : log_rhat) { v.push_back(tape.constant(x)); }
    return op_loss_pareto(v, u).value();
}

double pairwise_label(double u, double u_other) {
    return ((u > u_other ? 1.0 : 0.0) + (u >= u_other ? 1.0 : 0.0)) / 2.0;
}

std::vector<IndexPair> make_pairs(std::span<double const> u, Pairing pairing) {
    std::vector<IndexPair> pairs;
    if (pairing == Pairing::all_pairs) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            for (std::size_t j = i + 1; j < u.size(); ++j) { pairs.emplace_back(i, j); }
        }
        return pairs;
    }
    if (pairing != Pairing::sorted_neighbors) { throw ContractViolation("make_pairs needs a pairwise scheme"); }
    std::vector<std::size_t> order(u.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    for (std::size_t i = 0; i + 1 < order.size(); ++i) { pairs.emplace_back(order[i], order[i + 1]); }
    return pairs;
}

namespace {

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

} // namespace

Var op_loss_pairwise(std::span<Var const> log_rhat, std::span<double const> u, std::span<IndexPair const> pairs) {
    if (log_rhat.size() != u.size()) { throw ContractViolation("log-reward and objective batches differ in size"); }
    if (pairs.empty()) {
        if (log_rhat.empty()) { throw ContractViolation("order-preserving loss on an empty batch"); }
        return log_rhat.front().tape->constant(0.0);
    }
    std::vector<Var> terms;
    terms.reserve(pairs.size());
    for (auto [i, j] : pairs) {
        double const p = pairwise_label(u[i], u[j]);
        // KL = sum p log p - p log q_i - (1-p) log q_j, with -log q_i = softplus(l_j - l_i).
        Var const d = log_rhat[j] - log_rhat[i];
        Var term = log_rhat[i].tape->constant(xlogx(p) + xlogx(1.0 - p));
        if (p > 0.0) { term = term + ad::softplus(d) * p; }
        if (p < 1.0) { term = term + ad::softplus(-d) * (1.0 - p); }
        terms.push_back(term);
    }
    return ad::sum(terms);
}

double op_loss_pairwise_value(std::span<double const> log_rhat, std::span<double const> u,
                              std::span<IndexPair const> pairs) {
    ad::ParamStore empty;
    ad::Tape tape(empty);
    std::vector<Var> v;
    for (double x : log_rhat) { v.push_back(tape.constant(x)); }
    return op_loss_pairwise(v, u, pairs).value();
}

} // namespace opgfn::gfn
