#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "opgfn/ad/param_store.hpp"

namespace opgfn::ad {

class Tape;

// Handle to a scalar recorded on a tape.
struct Var {
    Tape* tape = nullptr;
    std::uint32_t id = 0;

    [[nodiscard]] double value() const;
};

// Adjoint callback of a multi-output block: receives the adjoints of the
// block's outputs and accumulates into the parameter gradient.
using BlockBackward = std::function<void(std::span<double const> out_adj, std::span<double> param_grad)>;

// Linear Wengert list. Nodes are appended in evaluation order, so reverse
// index order is a reverse topological order.
class Tape {
public:
    explicit Tape(ParamStore const& params);

    [[nodiscard]] ParamStore const& params() const { return *params_; }

    [[nodiscard]] Var constant(double v);
    // Leaf bound to a parameter slot; its adjoint lands in the gradient.
    [[nodiscard]] Var param(std::size_t slot);

    [[nodiscard]] Var unary(Var a, double value, double da);
    [[nodiscard]] Var binary(Var a, Var b, double value, double da, double db);
    [[nodiscard]] Var nary(std::span<Var const> inputs, std::span<double const> partials, double value);

    // Records opaque outputs whose dependence on parameters is handled by
    // `backward`. The outputs take no tape inputs.
    [[nodiscard]] std::vector<Var> block(std::span<double const> values, BlockBackward backward);

    [[nodiscard]] double value(std::uint32_t id) const { return values_[id]; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    // dLoss/dtheta scaled by `upstream`, sized to the parameter store.
    // A tape can be consumed once.
    [[nodiscard]] std::vector<double> backward(Var root, double upstream = 1.0);

private:
    std::uint32_t push(double value);

    struct Block {
        std::uint32_t first;
        std::uint32_t count;
        BlockBackward backward;
    };

    ParamStore const* params_;
    std::vector<double> values_;
    std::vector<std::uint32_t> edge_end_;
    std::vector<std::uint32_t> edge_parent_;
    std::vector<double> edge_partial_;
    std::vector<std::int64_t> slot_;
    std::vector<Block> blocks_;
    bool consumed_ = false;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);

Var exp(Var a);
Var log(Var a);
Var square(Var a);
// log(1 + exp(a)), stable for large |a|.
Var softplus(Var a);
// Gradient passes only strictly inside [lo, hi].
Var clamp(Var a, double lo, double hi);
Var sum(std::span<Var const> xs);
Var log_sum_exp(std::span<Var const> xs);

} // namespace opgfn::ad
