#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace opgfn::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(g);
}

inline std::vector<double> uniform_vector(std::mt19937_64& g, std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) { x = uniform(g, lo, hi); }
    return v;
}

inline double rel_close(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace opgfn::testing
