#include "opgfn/env/types.hpp"

#include "opgfn/errors.hpp"
#include "opgfn/util/hash.hpp"

namespace opgfn::env {

std::size_t StateHash::operator()(State const& s) const noexcept {
    std::uint64_t h = util::splitmix64(s.terminal ? 0x51ed2701ULL : 0x2545f491ULL);
    for (int c : s.cells) { h = util::splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(c))); }
    return static_cast<std::size_t>(h);
}

bool weakly_dominated(std::span<double const> a, std::span<double const> b) {
    if (a.size() != b.size()) { throw ContractViolation("dominance test on vectors of different length"); }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) { return false; }
    }
    return true;
}

bool strictly_dominated(std::span<double const> a, std::span<double const> b) {
    if (!weakly_dominated(a, b)) { return false; }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) { return true; }
    }
    return false;
}

} // namespace opgfn::env
