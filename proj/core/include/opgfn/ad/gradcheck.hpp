#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "opgfn/ad/param_store.hpp"
#include "opgfn/ad/tape.hpp"

namespace opgfn::ad {

struct GradCheckResult {
    // ||autodiff - fd|| / ||fd|| over the checked coordinates.
    double relative_error = 0.0;
    double fd_norm = 0.0;
    double ad_norm = 0.0;
};

using LossBuilder = std::function<Var(Tape&)>;

// Central differences with step h on the listed coordinates. `params` is
// perturbed in place and restored before returning.
[[nodiscard]] GradCheckResult gradcheck(ParamStore& params, LossBuilder const& build,
                                        std::span<std::size_t const> coords, double h = 1e-5);

// Up to `count` distinct coordinates drawn without replacement.
[[nodiscard]] std::vector<std::size_t> random_coordinates(std::size_t n, std::size_t count, std::uint64_t seed);

} // namespace opgfn::ad
