#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "opgfn/ad/param_store.hpp"

namespace opgfn::ad {

struct AdamConfig {
    double lr = 1e-3;
    // Per-slice overrides of the learning rate, keyed by slice name.
    std::map<std::string, double> slice_lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    // Gradient-norm clip; 0 disables clipping.
    double clip_norm = 0.0;
};

struct StepResult {
    bool applied = false;
    double grad_norm = 0.0;
    std::string diagnostic;
};

class Adam {
public:
    Adam(ParamStore const& params, AdamConfig config);

    // Bias-corrected Adam update. A gradient with non-finite entries is
    // rejected without touching parameters or moments.
    StepResult step(ParamStore& params, std::span<double const> grad);

    [[nodiscard]] std::uint64_t steps() const { return t_; }
    [[nodiscard]] std::vector<double> const& first_moment() const { return m_; }
    [[nodiscard]] std::vector<double> const& second_moment() const { return v_; }
    [[nodiscard]] AdamConfig const& config() const { return config_; }

    // Restores optimizer state, e.g. from a checkpoint.
    void restore(std::uint64_t t, std::vector<double> m, std::vector<double> v);

private:
    AdamConfig config_;
    std::vector<double> lr_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::uint64_t t_ = 0;
};

} // namespace opgfn::ad
