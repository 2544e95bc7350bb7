#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "opgfn/ad/tape.hpp"
#include "opgfn/env/types.hpp"
#include "opgfn/gfn/config.hpp"

namespace opgfn::gfn {

// y(x; X): true when no other batch member strictly dominates x. Identical
// objective vectors do not exclude each other.
[[nodiscard]] std::vector<bool> pareto_membership(std::span<env::ObjectiveVector const> u);

// KL(P_y(.|X) || R_hat(.)/sum R_hat) with P_y uniform on the batch's Pareto
// members. Needs at least two entries.
[[nodiscard]] ad::Var op_loss_pareto(std::span<ad::Var const> log_rhat, std::span<env::ObjectiveVector const> u);
[[nodiscard]] double op_loss_pareto_value(std::span<double const> log_rhat, std::span<env::ObjectiveVector const> u);

// Label of x in the pair (x, x'): (1[u > u'] + 1[u >= u']) / 2.
[[nodiscard]] double pairwise_label(double u, double u_other);

using IndexPair = std::pair<std::size_t, std::size_t>;

// sorted-neighbors: consecutive entries after a stable sort by u;
// all-pairs: every i < j.
[[nodiscard]] std::vector<IndexPair> make_pairs(std::span<double const> u, Pairing pairing);

// Sum over pairs of the two-point KL between labels and
// (R_hat(x), R_hat(x')) / (R_hat(x) + R_hat(x')).
[[nodiscard]] ad::Var op_loss_pairwise(std::span<ad::Var const> log_rhat, std::span<double const> u,
                                       std::span<IndexPair const> pairs);
[[nodiscard]] double op_loss_pairwise_value(std::span<double const> log_rhat, std::span<double const> u,
                                            std::span<IndexPair const> pairs);

} // namespace opgfn::gfn
