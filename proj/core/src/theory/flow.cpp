#include "opgfn/theory/flow.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <bit>

#include "opgfn/errors.hpp"
#include "opgfn/theory/chain.hpp"

namespace opgfn::theory {

namespace {

void check_lengths(std::size_t l, std::size_t k) {
    if (k == 0 || k > l) {
        throw ContractViolation("substring length " + std::to_string(k) + " must lie in [1, " + std::to_string(l) + "]");
    }
}

double binomial(std::size_t n, std::size_t r) {
    double out = 1.0;
    for (std::size_t i = 1; i <= r; ++i) { out = out * static_cast<double>(n - r + i) / static_cast<double>(i); }
    return out;
}

} // namespace

double substring_flow_fraction(std::vector<int> const& x, std::vector<int> const& s) {
    std::size_t const l = x.size();
    std::size_t const k = s.size();
    check_lengths(l, k);
    if (l > 20) { throw CapabilityError("build-order enumeration is limited to length 20"); }
    // Build order: start symbol p, then l-1 moves (bit set = prepend). The
    // order is valid when exactly p moves prepend.
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    std::uint64_t const moves = std::uint64_t{1} << (l - 1);
    for (std::size_t p = 0; p < l; ++p) {
        for (std::uint64_t mask = 0; mask < moves; ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != p) { continue; }
            ++total;
            std::size_t left = p;
            for (std::size_t step = 0; step + 1 < k; ++step) {
                if ((mask >> step) & 1U) { --left; }
            }
            bool match = true;
            for (std::size_t j = 0; j < k && match; ++j) { match = x[left + j] == s[j]; }
            hits += match ? 1 : 0;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

double substring_flow_fraction_at(std::size_t l, std::size_t k, std::size_t a) {
    check_lengths(l, k);
    if (a > l - k) { throw ContractViolation("substring offset out of range"); }
    return binomial(l - k, a) * std::ldexp(1.0, static_cast<int>(k) - static_cast<int>(l));
}

double expected_flow_fraction_bruteforce(std::size_t l, std::size_t k) {
    check_lengths(l, k);
    std::vector<int> x(l);
    std::iota(x.begin(), x.end(), 0);
    double sum = 0.0;
    for (std::size_t a = 0; a + k <= l; ++a) {
        std::vector<int> const s(x.begin() + static_cast<std::ptrdiff_t>(a), x.begin() + static_cast<std::ptrdiff_t>(a + k));
        sum += substring_flow_fraction(x, s);
    }
    return sum / static_cast<double>(l - k + 1);
}

std::string SeparationReport::status() const {
    if (!alpha_above_four()) { return "condition unmet"; }
    return separated ? "separated" : "not separated";
}

SeparationReport prop3_from_alpha(std::size_t l, std::size_t k, std::size_t n, double alpha) {
    check_lengths(l, k);
    if (n == 0) { throw ContractViolation("separation needs n >= 1"); }
    if (!(alpha > 1.0)) { throw ContractViolation("alpha must exceed 1"); }
    SeparationReport r;
    r.l = l;
    r.k = k;
    r.n = n;
    r.alpha = alpha;
    r.beta = beta_of(alpha);
    // x_0 .. x_n strict, x'_n tied with x_n: m = n, one tie.
    double const log_gamma = log_f1(alpha, n, n + 1);
    double reward = alpha * std::exp(-log_gamma);
    for (std::size_t i = 0; i <= n; ++i) {
        r.rewards.push_back(reward);
        reward *= alpha;
    }
    r.rewards.push_back(r.rewards[n] * r.beta);
    double const per = 1.0 / static_cast<double>(l - k + 1);
    double const below = std::accumulate(r.rewards.begin(), r.rewards.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    r.flow_shared = (r.rewards[n] + r.rewards[n + 1]) * per;
    r.flow_competitor = (r.rewards[n] + below) * per;
    if (l <= 12) {
        double const bf = expected_flow_fraction_bruteforce(l, k);
        r.flow_shared_bruteforce = (r.rewards[n] + r.rewards[n + 1]) * bf;
        r.flow_competitor_bruteforce = (r.rewards[n] + below) * bf;
    } else {
        r.flow_shared_bruteforce = std::numeric_limits<double>::quiet_NaN();
        r.flow_competitor_bruteforce = std::numeric_limits<double>::quiet_NaN();
    }
    r.sufficient_condition = 1.0 / (alpha - 1.0) < (alpha - 1.0) / (alpha + 3.0);
    r.separated = r.flow_shared > r.flow_competitor;
    return r;
}

SeparationReport prop3_expected_flow(std::size_t l, std::size_t k, std::size_t n, double gamma) {
    check_lengths(l, k);
    std::vector<double> u;
    for (std::size_t i = 0; i <= n; ++i) { u.push_back(static_cast<double>(i)); }
    u.push_back(static_cast<double>(n));
    auto const sol = prop2_solve(RankedChain{u, gamma, true});
    return prop3_from_alpha(l, k, n, sol.alpha);
}

} // namespace opgfn::theory
