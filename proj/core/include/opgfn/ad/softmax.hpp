#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "opgfn/ad/tape.hpp"

namespace opgfn::ad {

// Logits are clipped to this magnitude before any softmax.
inline constexpr double logit_clip = 50.0;
// Floor on sampling log-probabilities of legal entries.
inline constexpr double min_log_probability = -700.0;

// Log-probabilities over the full width; -inf on illegal entries. Logits are
// divided by `temperature`, then the result is mixed with the uniform
// distribution over legal entries with weight `epsilon`.
[[nodiscard]] std::vector<double> log_softmax_masked(std::span<double const> logits, std::span<std::size_t const> legal,
                                                     double temperature = 1.0, double epsilon = 0.0);

[[nodiscard]] std::vector<double> softmax_masked(std::span<double const> logits, std::span<std::size_t const> legal,
                                                 double temperature = 1.0, double epsilon = 0.0);
[[nodiscard]] std::vector<double> softmax_masked(std::span<double const> logits, std::vector<bool> const& legal,
                                                 double temperature = 1.0, double epsilon = 0.0);

// log softmax(logits restricted to legal)[chosen], recorded on the tape.
[[nodiscard]] Var log_softmax_at(std::span<Var const> logits, std::span<std::size_t const> legal, std::size_t chosen);

} // namespace opgfn::ad
