#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opgfn/ad/param_store.hpp"
#include "opgfn/ad/tape.hpp"

namespace opgfn::ad {

enum class Activation { relu, leaky_relu };

inline constexpr double leaky_relu_slope = 0.01;

[[nodiscard]] Activation parse_activation(std::string const& text);
[[nodiscard]] std::string to_string(Activation a);

// Fully connected feedforward network whose weights live in a ParamStore.
// Hidden layers use the activation; the output layer is linear.
class Mlp {
public:
    Mlp() = default;
    // Registers slices "<prefix>.l<i>.w" (row-major out x in) and "<prefix>.l<i>.b".
    Mlp(ParamStore& params, std::string const& prefix, std::size_t input, std::vector<std::size_t> hidden,
        std::size_t output, Activation activation);

    // He-uniform weights, zero biases.
    void initialize(ParamStore& params, std::uint64_t seed) const;

    [[nodiscard]] std::size_t input_width() const { return widths_.front(); }
    [[nodiscard]] std::size_t output_width() const { return widths_.back(); }
    [[nodiscard]] std::vector<std::size_t> const& widths() const { return widths_; }

    [[nodiscard]] std::vector<double> forward(ParamStore const& params, std::span<double const> input) const;
    // Records the whole network as one block on the tape.
    [[nodiscard]] std::vector<Var> forward(Tape& tape, std::span<double const> input) const;

private:
    struct Layer {
        std::size_t w = 0;
        std::size_t b = 0;
        std::size_t in = 0;
        std::size_t out = 0;
    };

    // Fills activations[0..L] (activations[0] = input) and pre-activations.
    void run(ParamStore const& params, std::span<double const> input, std::vector<std::vector<double>>& pre,
             std::vector<std::vector<double>>& act) const;

    std::vector<std::size_t> widths_;
    std::vector<Layer> layers_;
    Activation activation_ = Activation::relu;
};

// One learnable row of logits per dense index.
class Table {
public:
    Table() = default;
    Table(ParamStore& params, std::string const& name, std::size_t rows, std::size_t width);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t width() const { return width_; }
    [[nodiscard]] std::size_t slot(std::size_t row, std::size_t col) const { return offset_ + row * width_ + col; }

    [[nodiscard]] std::span<double const> row(ParamStore const& params, std::size_t r) const;
    [[nodiscard]] std::vector<Var> row(Tape& tape, std::size_t r) const;

private:
    std::size_t offset_ = 0;
    std::size_t rows_ = 0;
    std::size_t width_ = 0;
};

} // namespace opgfn::ad
