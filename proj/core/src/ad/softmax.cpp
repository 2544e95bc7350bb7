#include "opgfn/ad/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opgfn/errors.hpp"

namespace opgfn::ad {

std::vector<double> log_softmax_masked(std::span<double const> logits, std::span<std::size_t const> legal,
                                       double temperature, double epsilon) {
    if (legal.empty()) { throw ContractViolation("softmax over an empty legal set"); }
    if (!(temperature > 0.0)) { throw ContractViolation("softmax temperature must be positive"); }
    if (epsilon < 0.0 || epsilon > 1.0) { throw ContractViolation("exploration epsilon outside [0, 1]"); }
    double const ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> out(logits.size(), ninf);
    double m = ninf;
    for (auto i : legal) {
        if (i >= logits.size()) { throw ContractViolation("legal index outside the logit vector"); }
        out[i] = std::clamp(logits[i], -logit_clip, logit_clip) / temperature;
        m = std::max(m, out[i]);
    }
    double s = 0.0;
    for (auto i : legal) { s += std::exp(out[i] - m); }
    double const lse = m + std::log(s);
    // Keeps legal entries strictly positive after exponentiation even under
    // a small temperature; the mass added is below 1e-300.
    for (auto i : legal) { out[i] = std::max(out[i] - lse, min_log_probability); }
    if (epsilon > 0.0) {
        double const log_uniform = -std::log(static_cast<double>(legal.size()));
        for (auto i : legal) {
            if (epsilon >= 1.0) {
                out[i] = log_uniform;
            } else {
                // log((1-eps) p + eps u), computed as a two-term log-sum-exp.
                double const a = std::log1p(-epsilon) + out[i];
                double const b = std::log(epsilon) + log_uniform;
                double const hi = std::max(a, b);
                out[i] = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
            }
        }
    }
    return out;
}

std::vector<double> softmax_masked(std::span<double const> logits, std::span<std::size_t const> legal,
                                   double temperature, double epsilon) {
    auto out = log_softmax_masked(logits, legal, temperature, epsilon);
    for (auto& v : out) { v = std::exp(v); }
    return out;
}

std::vector<double> softmax_masked(std::span<double const> logits, std::vector<bool> const& legal, double temperature,
                                   double epsilon) {
    if (legal.size() != logits.size()) { throw ContractViolation("mask and logits differ in width"); }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < legal.size(); ++i) {
        if (legal[i]) { idx.push_back(i); }
    }
    return softmax_masked(logits, idx, temperature, epsilon);
}

Var log_softmax_at(std::span<Var const> logits, std::span<std::size_t const> legal, std::size_t chosen) {
    if (legal.empty()) { throw ContractViolation("softmax over an empty legal set"); }
    if (std::find(legal.begin(), legal.end(), chosen) == legal.end()) {
        throw ContractViolation("chosen action is not legal");
    }
    if (legal.size() == 1) { return logits[chosen].tape->constant(0.0); }
    std::vector<Var> picked;
    picked.reserve(legal.size());
    Var chosen_var{};
    for (auto i : legal) {
        picked.push_back(clamp(logits[i], -logit_clip, logit_clip));
        if (i == chosen) { chosen_var = picked.back(); }
    }
    return chosen_var - log_sum_exp(picked);
}

} // namespace opgfn::ad
