#include "opgfn/ad/adam.hpp"

#include <cmath>

#include "opgfn/errors.hpp"

namespace opgfn::ad {

Adam::Adam(ParamStore const& params, AdamConfig config)
    : config_(std::move(config)), lr_(params.size(), config_.lr), m_(params.size(), 0.0), v_(params.size(), 0.0) {
    for (auto const& [name, lr] : config_.slice_lr) {
        if (!params.has_slice(name)) { continue; }
        auto const& s = params.slice(name);
        for (std::size_t i = 0; i < s.size; ++i) { lr_[s.offset + i] = lr; }
    }
}

StepResult Adam::step(ParamStore& params, std::span<double const> grad) {
    if (grad.size() != params.size() || params.size() != m_.size()) {
        throw ContractViolation("gradient and parameter sizes differ");
    }
    StepResult result;
    double sq = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!std::isfinite(grad[i])) {
            result.diagnostic = "non-finite gradient at parameter " + std::to_string(i);
            return result;
        }
        sq += grad[i] * grad[i];
    }
    result.grad_norm = std::sqrt(sq);
    double scale = 1.0;
    if (config_.clip_norm > 0.0 && result.grad_norm > config_.clip_norm) { scale = config_.clip_norm / result.grad_norm; }
    ++t_;
    double const c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    double const c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        double const g = grad[i] * scale;
        m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
        v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
        double const mhat = m_[i] / c1;
        double const vhat = v_[i] / c2;
        params[i] -= lr_[i] * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
    result.applied = true;
    return result;
}

void Adam::restore(std::uint64_t t, std::vector<double> m, std::vector<double> v) {
    if (m.size() != m_.size() || v.size() != v_.size()) { throw ContractViolation("optimizer state size mismatch"); }
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
}

} // namespace opgfn::ad
