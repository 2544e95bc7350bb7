#include "opgfn/ad/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opgfn/errors.hpp"

namespace opgfn::ad {

double Var::value() const { return tape->value(id); }

Tape::Tape(ParamStore const& params) : params_(&params) {}

std::uint32_t Tape::push(double value) {
    if (consumed_) { throw ContractViolation("recording on a consumed tape"); }
    if (values_.size() >= std::numeric_limits<std::uint32_t>::max()) { throw ContractViolation("tape too long"); }
    values_.push_back(value);
    edge_end_.push_back(static_cast<std::uint32_t>(edge_parent_.size()));
    slot_.push_back(-1);
    return static_cast<std::uint32_t>(values_.size() - 1);
}

Var Tape::constant(double v) { return Var{this, push(v)}; }

Var Tape::param(std::size_t slot) {
    if (slot >= params_->size()) { throw ContractViolation("parameter slot out of range"); }
    auto const id = push((*params_)[slot]);
    slot_[id] = static_cast<std::int64_t>(slot);
    return Var{this, id};
}

Var Tape::unary(Var a, double value, double da) {
    edge_parent_.push_back(a.id);
    edge_partial_.push_back(da);
    auto const id = push(value);
    return Var{this, id};
}

Var Tape::binary(Var a, Var b, double value, double da, double db) {
    edge_parent_.push_back(a.id);
    edge_partial_.push_back(da);
    edge_parent_.push_back(b.id);
    edge_partial_.push_back(db);
    auto const id = push(value);
    return Var{this, id};
}

Var Tape::nary(std::span<Var const> inputs, std::span<double const> partials, double value) {
    if (inputs.size() != partials.size()) { throw ContractViolation("nary: inputs and partials differ in length"); }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        edge_parent_.push_back(inputs[i].id);
        edge_partial_.push_back(partials[i]);
    }
    auto const id = push(value);
    return Var{this, id};
}

std::vector<Var> Tape::block(std::span<double const> values, BlockBackward backward) {
    std::vector<Var> out;
    out.reserve(values.size());
    auto const first = static_cast<std::uint32_t>(values_.size());
    for (double v : values) { out.push_back(Var{this, push(v)}); }
    if (!values.empty()) {
        blocks_.push_back(Block{first, static_cast<std::uint32_t>(values.size()), std::move(backward)});
    }
    return out;
}

std::vector<double> Tape::backward(Var root, double upstream) {
    if (consumed_) { throw ContractViolation("tape already consumed by a backward pass"); }
    if (root.tape != this) { throw ContractViolation("root belongs to a different tape"); }
    consumed_ = true;
    std::vector<double> grad(params_->size(), 0.0);
    std::vector<double> adj(values_.size(), 0.0);
    adj[root.id] = upstream;
    auto block_it = blocks_.rbegin();
    while (block_it != blocks_.rend() && block_it->first > root.id) { ++block_it; }
    for (std::size_t i = root.id + 1; i-- > 0;) {
        double const a = adj[i];
        if (a != 0.0) {
            std::uint32_t const begin = i == 0 ? 0 : edge_end_[i - 1];
            for (std::uint32_t e = begin; e < edge_end_[i]; ++e) { adj[edge_parent_[e]] += a * edge_partial_[e]; }
            if (slot_[i] >= 0) { grad[static_cast<std::size_t>(slot_[i])] += a; }
        }
        if (block_it != blocks_.rend() && block_it->first == i) {
            std::span<double const> out_adj(adj.data() + i, block_it->count);
            if (std::any_of(out_adj.begin(), out_adj.end(), [](double v) { return v != 0.0; })) {
                block_it->backward(out_adj, grad);
            }
            ++block_it;
        }
    }
    return grad;
}

namespace {

Tape* tape_of(Var a, Var b) {
    if (a.tape != b.tape) { throw ContractViolation("operands recorded on different tapes"); }
    return a.tape;
}

} // namespace

Var operator+(Var a, Var b) { return tape_of(a, b)->binary(a, b, a.value() + b.value(), 1.0, 1.0); }
Var operator-(Var a, Var b) { return tape_of(a, b)->binary(a, b, a.value() - b.value(), 1.0, -1.0); }
Var operator*(Var a, Var b) {
    double const x = a.value();
    double const y = b.value();
    return tape_of(a, b)->binary(a, b, x * y, y, x);
}
Var operator/(Var a, Var b) {
    double const x = a.value();
    double const y = b.value();
    return tape_of(a, b)->binary(a, b, x / y, 1.0 / y, -x / (y * y));
}
Var operator-(Var a) { return a.tape->unary(a, -a.value(), -1.0); }
Var operator+(Var a, double b) { return a.tape->unary(a, a.value() + b, 1.0); }
Var operator+(double a, Var b) { return b + a; }
Var operator-(Var a, double b) { return a.tape->unary(a, a.value() - b, 1.0); }
Var operator-(double a, Var b) { return b.tape->unary(b, a - b.value(), -1.0); }
Var operator*(Var a, double b) { return a.tape->unary(a, a.value() * b, b); }
Var operator*(double a, Var b) { return b * a; }
Var operator/(Var a, double b) { return a.tape->unary(a, a.value() / b, 1.0 / b); }

Var exp(Var a) {
    double const v = std::exp(a.value());
    return a.tape->unary(a, v, v);
}

Var log(Var a) {
    double const x = a.value();
    return a.tape->unary(a, std::log(x), 1.0 / x);
}

Var square(Var a) {
    double const x = a.value();
    return a.tape->unary(a, x * x, 2.0 * x);
}

Var softplus(Var a) {
    double const x = a.value();
    double const v = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    double const sig = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return a.tape->unary(a, v, sig);
}

Var clamp(Var a, double lo, double hi) {
    double const x = a.value();
    if (x < lo) { return a.tape->unary(a, lo, 0.0); }
    if (x > hi) { return a.tape->unary(a, hi, 0.0); }
    return a.tape->unary(a, x, 1.0);
}

Var sum(std::span<Var const> xs) {
    if (xs.empty()) { throw ContractViolation("sum of an empty list"); }
    double total = 0.0;
    for (auto const& x : xs) { total += x.value(); }
    std::vector<double> ones(xs.size(), 1.0);
    return xs.front().tape->nary(xs, ones, total);
}

Var log_sum_exp(std::span<Var const> xs) {
    if (xs.empty()) { throw ContractViolation("log_sum_exp of an empty list"); }
    double m = -std::numeric_limits<double>::infinity();
    for (auto const& x : xs) { m = std::max(m, x.value()); }
    std::vector<double> w(xs.size());
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        w[i] = std::exp(xs[i].value() - m);
        s += w[i];
    }
    for (auto& wi : w) { wi /= s; }
    return xs.front().tape->nary(xs, w, m + std::log(s));
}

} // namespace opgfn::ad
