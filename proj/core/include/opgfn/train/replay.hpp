#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <span>
#include <vector>

#include "opgfn/env/types.hpp"

namespace opgfn::train {

struct ReplayEntry {
    env::State terminal;
    env::ObjectiveVector objective;
    std::size_t round = 0;
};

// Bounded FIFO store of visited terminals with their cached objectives.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void add(ReplayEntry entry);
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] std::deque<ReplayEntry> const& entries() const { return entries_; }

    // Uniform draws with replacement.
    [[nodiscard]] std::vector<ReplayEntry> sample_uniform(std::size_t count, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::deque<ReplayEntry> entries_;
};

// Prioritized replay: ceil(alpha1% of the batch) comes from the entries whose
// score is in the top alpha2% and the rest from the remaining entries. When
// every score is equal the draw is uniform. Tiers smaller than their share
// are sampled with replacement.
[[nodiscard]] std::vector<ReplayEntry> prt_sample(ReplayBuffer const& buffer, std::span<double const> scores,
                                                  std::size_t batch, double alpha1, double alpha2,
                                                  std::mt19937_64& rng);

} // namespace opgfn::train
