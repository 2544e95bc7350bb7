#include "opgfn/ad/network.hpp"

#include <cmath>
#include <random>

#include "opgfn/errors.hpp"

namespace opgfn::ad {

Activation parse_activation(std::string const& text) {
    if (text == "relu") { return Activation::relu; }
    if (text == "leaky-relu") { return Activation::leaky_relu; }
    throw ConfigError("model.activation: unknown activation '" + text + "'");
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "leaky-relu"; }

Mlp::Mlp(ParamStore& params, std::string const& prefix, std::size_t input, std::vector<std::size_t> hidden,
         std::size_t output, Activation activation)
    : activation_(activation) {
    if (input == 0 || output == 0) { throw ContractViolation("network widths must be positive"); }
    widths_.push_back(input);
    for (auto h : hidden) {
        if (h == 0) { throw ConfigError("model.hidden: layer widths must be positive"); }
        widths_.push_back(h);
    }
    widths_.push_back(output);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        Layer layer;
        layer.in = widths_[l];
        layer.out = widths_[l + 1];
        layer.w = params.add_slice(prefix + ".l" + std::to_string(l) + ".w", layer.in * layer.out);
        layer.b = params.add_slice(prefix + ".l" + std::to_string(l) + ".b", layer.out);
        layers_.push_back(layer);
    }
}

void Mlp::initialize(ParamStore& params, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    for (auto const& layer : layers_) {
        double const limit = std::sqrt(6.0 / static_cast<double>(layer.in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t i = 0; i < layer.in * layer.out; ++i) { params[layer.w + i] = dist(rng); }
        for (std::size_t i = 0; i < layer.out; ++i) { params[layer.b + i] = 0.0; }
    }
}

void Mlp::run(ParamStore const& params, std::span<double const> input, std::vector<std::vector<double>>& pre,
              std::vector<std::vector<double>>& act) const {
    if (input.size() != input_width()) {
        throw ContractViolation("network input has width " + std::to_string(input.size()) + ", expected " +
                                std::to_string(input_width()));
    }
    auto const values = params.values();
    act.assign(layers_.size() + 1, {});
    pre.assign(layers_.size(), {});
    act[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        auto const& layer = layers_[l];
        auto const& x = act[l];
        auto& z = pre[l];
        z.assign(values.begin() + static_cast<std::ptrdiff_t>(layer.b),
                 values.begin() + static_cast<std::ptrdiff_t>(layer.b + layer.out));
        for (std::size_t o = 0; o < layer.out; ++o) {
            double const* w = values.data() + layer.w + o * layer.in;
            double acc = 0.0;
            for (std::size_t i = 0; i < layer.in; ++i) { acc += w[i] * x[i]; }
            z[o] += acc;
        }
        auto& a = act[l + 1];
        a = z;
        if (l + 1 < layers_.size()) {
            double const slope = activation_ == Activation::relu ? 0.0 : leaky_relu_slope;
            for (auto& v : a) { v = v > 0.0 ? v : slope * v; }
        }
    }
}

std::vector<double> Mlp::forward(ParamStore const& params, std::span<double const> input) const {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
    run(params, input, pre, act);
    return std::move(act.back());
}

std::vector<Var> Mlp::forward(Tape& tape, std::span<double const> input) const {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
    run(tape.params(), input, pre, act);
    auto const out = act.back();
    ParamStore const* params = &tape.params();
    auto const layers = layers_;
    double const slope = activation_ == Activation::relu ? 0.0 : leaky_relu_slope;
    return tape.block(out, [params, layers, slope, pre = std::move(pre), act = std::move(act)](
                               std::span<double const> out_adj, std::span<double> grad) {
        auto const values = params->values();
        std::vector<double> delta(out_adj.begin(), out_adj.end());
        for (std::size_t l = layers.size(); l-- > 0;) {
            auto const& layer = layers[l];
            auto const& x = act[l];
            for (std::size_t o = 0; o < layer.out; ++o) {
                double const d = delta[o];
                if (d == 0.0) { continue; }
                grad[layer.b + o] += d;
                double* gw = grad.data() + layer.w + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) { gw[i] += d * x[i]; }
            }
            if (l == 0) { break; }
            std::vector<double> prev(layer.in, 0.0);
            for (std::size_t o = 0; o < layer.out; ++o) {
                double const d = delta[o];
                if (d == 0.0) { continue; }
                double const* w = values.data() + layer.w + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) { prev[i] += w[i] * d; }
            }
            auto const& z = pre[l - 1];
            for (std::size_t i = 0; i < layer.in; ++i) { prev[i] *= z[i] > 0.0 ? 1.0 : slope; }
            delta = std::move(prev);
        }
    });
}

Table::Table(ParamStore& params, std::string const& name, std::size_t rows, std::size_t width)
    : offset_(params.add_slice(name, rows * width)), rows_(rows), width_(width) {}

std::span<double const> Table::row(ParamStore const& params, std::size_t r) const {
    if (r >= rows_) { throw ContractViolation("table row out of range"); }
    return params.values().subspan(offset_ + r * width_, width_);
}

std::vector<Var> Table::row(Tape& tape, std::size_t r) const {
    if (r >= rows_) { throw ContractViolation("table row out of range"); }
    std::vector<Var> out;
    out.reserve(width_);
    for (std::size_t c = 0; c < width_; ++c) { out.push_back(tape.param(slot(r, c))); }
    return out;
}

} // namespace opgfn::ad
