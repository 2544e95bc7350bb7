#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opgfn/ad/network.hpp"
#include "opgfn/ad/param_store.hpp"
#include "opgfn/ad/tape.hpp"
#include "opgfn/env/environment.hpp"
#include "opgfn/gfn/config.hpp"

namespace opgfn::gfn {

enum class ModelType { tabular, mlp };

[[nodiscard]] std::string to_string(ModelType t);
[[nodiscard]] ModelType parse_model_type(std::string const& text);

struct ModelSpec {
    ModelType type = ModelType::mlp;
    std::vector<std::size_t> hidden{256, 256};
    ad::Activation activation = ad::Activation::relu;
    double init_log_z = 0.0;
    std::uint64_t seed = 0;
    // Width of a preference vector appended to the network input; 0 when unconditioned.
    std::size_t preference_dim = 0;
};

// Largest state space a tabular model will index.
inline constexpr std::uint64_t max_tabular_states = 20'000'000;

struct Heads {
    std::vector<double> forward;
    std::vector<double> backward;
    double log_flow = 0.0;
};

struct HeadVars {
    std::vector<ad::Var> forward;
    std::vector<ad::Var> backward;
    ad::Var log_flow;
};

// Which heads a taped evaluation must expose. Tabular models record only the
// requested columns; networks always record the full output block.
struct HeadRequest {
    bool forward = true;
    bool backward = true;
    bool flow = true;
};

// Learnable parametrization: forward logits, backward logits (when P_B is
// trainable), a log state-flow head and a standalone log Z scalar. Heads share
// one encoder (network) or one table row (tabular).
class FlowModel {
public:
    FlowModel(env::Environment const& env, ModelSpec spec, BackwardMode backward);

    FlowModel(FlowModel const&) = default;
    FlowModel& operator=(FlowModel const&) = default;

    [[nodiscard]] ModelSpec const& spec() const { return spec_; }
    [[nodiscard]] bool trainable_backward() const { return trainable_backward_; }
    [[nodiscard]] env::Environment const& environment() const { return *env_; }
    [[nodiscard]] std::string describe() const;

    [[nodiscard]] ad::ParamStore& params() { return params_; }
    [[nodiscard]] ad::ParamStore const& params() const { return params_; }

    [[nodiscard]] double log_z() const { return params_[log_z_slot_]; }
    [[nodiscard]] ad::Var log_z(ad::Tape& tape) const { return tape.param(log_z_slot_); }
    [[nodiscard]] std::size_t log_z_slot() const { return log_z_slot_; }

    // Parameter slot of a tabular head entry. Columns are the forward logits,
    // then the backward logits when trainable, then the log flow.
    [[nodiscard]] std::size_t table_slot(env::State const& s, std::size_t column) const;
    [[nodiscard]] std::size_t forward_column(std::size_t action) const { return action; }
    [[nodiscard]] std::size_t backward_column(std::size_t action) const { return n_forward_ + action; }
    [[nodiscard]] std::size_t flow_column() const { return n_forward_ + (trainable_backward_ ? n_backward_ : 0); }

    [[nodiscard]] Heads evaluate(env::State const& s, std::span<double const> preference = {}) const;
    [[nodiscard]] HeadVars record(ad::Tape& tape, env::State const& s, std::span<double const> preference = {},
                                  HeadRequest request = {}) const;

private:
    [[nodiscard]] std::vector<double> input(env::State const& s, std::span<double const> preference) const;

    env::Environment const* env_;
    ModelSpec spec_;
    bool trainable_backward_;
    std::size_t n_forward_;
    std::size_t n_backward_;
    ad::ParamStore params_;
    std::size_t log_z_slot_ = 0;
    ad::Mlp net_;
    ad::Table table_;
};

} // namespace opgfn::gfn
