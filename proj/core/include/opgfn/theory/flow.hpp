#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace opgfn::theory {

// Fraction of the 2^(l-1) prepend/append build orders of `x` whose length-|s|
// state equals `s`. Exhaustive; l is limited to 20.
[[nodiscard]] double substring_flow_fraction(std::vector<int> const& x, std::vector<int> const& s);

// Closed form for one occurrence at offset a: C(l-k, a) 2^(k-1) / 2^(l-1).
[[nodiscard]] double substring_flow_fraction_at(std::size_t l, std::size_t k, std::size_t a);

// Average of substring_flow_fraction over every offset of a length-k
// substring in a length-l string of distinct symbols, found by enumeration.
// Equals 1/(l-k+1).
[[nodiscard]] double expected_flow_fraction_bruteforce(std::size_t l, std::size_t k);

struct SeparationReport {
    std::size_t l = 0;
    std::size_t k = 0;
    std::size_t n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    // R_hat(x_0..x_n) followed by R_hat(x'_n).
    std::vector<double> rewards;
    // Shared substring s*: carried by x_n and x'_n.
    double flow_shared = 0.0;
    // Worst competitor from s_k(x_n): carried by x_0..x_n.
    double flow_competitor = 0.0;
    // Same two quantities from exhaustive enumeration (l <= 12 only, else NaN).
    double flow_shared_bruteforce = 0.0;
    double flow_competitor_bruteforce = 0.0;
    // 1/(alpha - 1) < (alpha - 1)/(alpha + 3), the sufficient condition.
    bool sufficient_condition = false;
    bool separated = false;

    [[nodiscard]] bool alpha_above_four() const { return alpha > 4.0; }
    // "separated", "not separated" or "condition unmet" (alpha <= 4).
    [[nodiscard]] std::string status() const;
};

// Rewards on the chain x_0 < ... < x_n = x'_n from the piecewise solution at
// the given alpha (gamma follows from alpha).
[[nodiscard]] SeparationReport prop3_from_alpha(std::size_t l, std::size_t k, std::size_t n, double alpha);
// Same with alpha solved from gamma; throws PreconditionError when gamma <= gamma0.
[[nodiscard]] SeparationReport prop3_expected_flow(std::size_t l, std::size_t k, std::size_t n, double gamma);

} // namespace opgfn::theory
