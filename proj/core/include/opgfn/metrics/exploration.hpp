#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "opgfn/env/environment.hpp"
#include "opgfn/gfn/config.hpp"
#include "opgfn/gfn/model.hpp"

namespace opgfn::metrics {

inline constexpr std::size_t default_visit_window = 100'000;
inline constexpr std::size_t default_recent_window = 4'000;

// Terminal indices of the maximal set: the argmax of u for one objective
// (relative tolerance 1e-12), the Pareto front otherwise.
[[nodiscard]] std::vector<std::size_t> maximal_terminals(env::Environment const& env);

// R(x)^beta / Z_beta over terminal_index for a single positive objective.
[[nodiscard]] std::vector<double> target_distribution(env::Environment const& env, double beta);

struct ExplorationRatios {
    double r1 = 0.0;  // distinct visited terminals / all terminals
    double r2 = 0.0;  // distinct visited maximal terminals / all maximal terminals
    double r3 = 0.0;  // visits to maximal terminals among the recent window / window size
    std::size_t distinct_max_recent = 0;
};

// Pure form over a visit log of terminal indices. `is_maximal` is indexed by
// terminal index. r3 uses the last `recent` visits and divides by `recent`.
[[nodiscard]] ExplorationRatios exploration_ratios(std::span<std::size_t const> visits,
                                                   std::vector<bool> const& is_maximal, std::size_t n_terminals,
                                                   std::size_t recent = default_recent_window);

// sum_x |empirical(x) - target(x)| with empirical counts over `visits`.
[[nodiscard]] double l1_to_target(std::span<std::size_t const> visits, std::span<double const> target);

// Incremental bookkeeping for training runs on enumerable environments.
class VisitTracker {
public:
    VisitTracker(env::Environment const& env, double beta, std::size_t window = default_visit_window,
                 std::size_t recent = default_recent_window);

    void record(env::State const& terminal);

    [[nodiscard]] ExplorationRatios ratios() const;
    // L1 between the visit window and the target; NaN for D > 1.
    [[nodiscard]] double l1() const;

    [[nodiscard]] std::size_t total_visits() const { return total_; }
    [[nodiscard]] std::deque<std::size_t> const& window() const { return window_; }
    [[nodiscard]] std::size_t maximal_count() const { return maximal_count_; }

private:
    env::Environment const* env_;
    std::size_t n_terminals_;
    std::size_t window_size_;
    std::size_t recent_;
    std::vector<bool> is_maximal_;
    std::size_t maximal_count_ = 0;
    std::vector<double> target_;
    std::vector<bool> seen_;
    std::size_t distinct_ = 0;
    std::size_t distinct_max_ = 0;
    std::deque<std::size_t> window_;
    std::size_t total_ = 0;
};

struct LandscapeRow {
    double u = 0.0;
    double mean_log_reward = 0.0;
    std::size_t count = 0;
};

// Terminals grouped by distinct u (relative tolerance 1e-12), mean learned
// log reward per group, ascending in u. For TB the learned reward is
// Z * P_T(x) from the exact terminal distribution; for DB and subTB the
// terminal flow head; for FM the terminal edge flow.
[[nodiscard]] std::vector<LandscapeRow> reward_landscape(gfn::FlowModel const& model, gfn::Criterion criterion);

} // namespace opgfn::metrics
