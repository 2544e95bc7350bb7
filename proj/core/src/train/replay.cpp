#include "opgfn/train/replay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opgfn/errors.hpp"
#include "opgfn/util/hash.hpp"

namespace opgfn::train {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) { throw ConfigError("train.replay_capacity must be positive"); }
}

void ReplayBuffer::add(ReplayEntry entry) {
    if (entries_.size() == capacity_) { entries_.pop_front(); }
    entries_.push_back(std::move(entry));
}

namespace {

std::size_t uniform_index(std::size_t n, std::mt19937_64& rng) {
    return static_cast<std::size_t>(util::unit_interval(rng()) * static_cast<double>(n));
}

// `count` members of `pool`, without replacement when the pool is large enough.
std::vector<std::size_t> draw_from(std::vector<std::size_t> pool, std::size_t count, std::mt19937_64& rng) {
    std::vector<std::size_t> out;
    if (pool.empty() || count == 0) { return out; }
    if (pool.size() >= count) {
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t const j = i + uniform_index(pool.size() - i, rng);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) { out.push_back(pool[uniform_index(pool.size(), rng)]); }
    return out;
}

} // namespace

std::vector<ReplayEntry> ReplayBuffer::sample_uniform(std::size_t count, std::mt19937_64& rng) const {
    if (entries_.empty()) { throw ContractViolation("sampling from an empty replay buffer"); }
    std::vector<ReplayEntry> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) { out.push_back(entries_[uniform_index(entries_.size(), rng)]); }
    return out;
}

std::vector<ReplayEntry> prt_sample(ReplayBuffer const& buffer, std::span<double const> scores, std::size_t batch,
                                    double alpha1, double alpha2, std::mt19937_64& rng) {
    if (buffer.empty()) { throw ContractViolation("sampling from an empty replay buffer"); }
    if (scores.size() != buffer.size()) { throw ContractViolation("one score per replay entry is required"); }
    if (!(alpha1 >= 0.0 && alpha1 <= 100.0 && alpha2 > 0.0 && alpha2 <= 100.0)) {
        throw ConfigError("train.prt_alpha1/prt_alpha2 must be percentages");
    }
    std::size_t const n = buffer.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<ReplayEntry> out;
    out.reserve(batch);
    auto const [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    if (*lo == *hi) {
        for (auto i : draw_from(order, batch, rng)) { out.push_back(buffer.entries()[i]); }
        return out;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    auto const top_size = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(alpha2 / 100.0 * static_cast<double>(n) - 1e-9)));
    std::vector<std::size_t> top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(top_size, n)));
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(top.size()), order.end());
    auto n_top = static_cast<std::size_t>(std::ceil(alpha1 / 100.0 * static_cast<double>(batch) - 1e-9));
    n_top = std::min(n_top, batch);
    if (rest.empty()) { n_top = batch; }
    for (auto i : draw_from(top, n_top, rng)) { out.push_back(buffer.entries()[i]); }
    for (auto i : draw_from(rest, batch - n_top, rng)) { out.push_back(buffer.entries()[i]); }
    return out;
}

} // namespace opgfn::train
