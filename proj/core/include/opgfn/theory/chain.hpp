#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace opgfn::theory {

// Relation between consecutive members of a ranked chain.
enum class Link { strict, tie };

// Objective values u_0 <= ... <= u_n and the box bound gamma > 1. With
// auxiliaries, two virtual members at -inf and +inf pin the ends.
struct RankedChain {
    std::vector<double> u;
    double gamma = 1e6;
    bool auxiliaries = true;

    [[nodiscard]] std::size_t n() const { return u.empty() ? 0 : u.size() - 1; }
    // Links between consecutive members, excluding auxiliaries.
    [[nodiscard]] std::vector<Link> links() const;
    // |I1|: the number of strict links.
    [[nodiscard]] std::size_t m() const;
};

struct ChainSolution {
    // R_hat(x_0..x_n); auxiliaries are reported separately.
    std::vector<double> rewards;
    double aux_low = 0.0;
    double aux_high = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma0 = 1.0;
    // Sum of pairwise KL terms over neighbouring pairs (auxiliary pairs included).
    double loss = 0.0;
};

// Neighbouring-pair loss: softplus(l_j - l_{j+1}) on strict links and the
// two-point KL against (1/2, 1/2) on ties. `log_r` has links.size() + 1 entries.
[[nodiscard]] double chain_loss(std::span<double const> log_r, std::span<Link const> links);
[[nodiscard]] std::vector<double> chain_loss_gradient(std::span<double const> log_r, std::span<Link const> links);

struct MinimizeResult {
    std::vector<double> log_r;
    double loss = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Minimizes chain_loss over the box [-log gamma, 0] in log space with a
// projected Newton method (active set on the box faces, Armijo backtracking).
[[nodiscard]] MinimizeResult minimize_chain(std::span<Link const> links, double gamma, std::size_t max_iter = 500);

// All-distinct chain without auxiliaries: R_hat(x_i) = gamma^(i/n - 1).
// `loss` is evaluated at that point: n log(1 + gamma^(-1/n)).
[[nodiscard]] ChainSolution prop1_closed_form(std::size_t n, double gamma);
// The loss value n log(1 + 1/gamma) as stated alongside the closed form.
[[nodiscard]] double prop1_stated_loss(std::size_t n, double gamma);

// log f1(alpha) = (m + 2) log alpha + (n - m) log((alpha - 1)/(alpha + 3)).
[[nodiscard]] double log_f1(double alpha, std::size_t m, std::size_t n);
// Root of f1(gamma^(1/(m+1))) = gamma by bisection over [1 + 1e-9, 1e12]; 1 when m = n.
[[nodiscard]] double gamma0(std::size_t m, std::size_t n);
// Root of f1(alpha) = gamma, relative tolerance 1e-12.
[[nodiscard]] double alpha_gamma(std::size_t m, std::size_t n, double gamma);
[[nodiscard]] inline double beta_of(double alpha) { return (alpha - 1.0) / (alpha + 3.0); }

// Piecewise-geometric solution for a chain with auxiliaries. Throws
// PreconditionError (message includes gamma0) when gamma <= gamma0.
[[nodiscard]] ChainSolution prop2_solve(RankedChain const& chain);
// The loss in closed form as a function of alpha (KL form, ties included).
[[nodiscard]] double prop2_loss(double alpha, std::size_t m, std::size_t n);

struct TrendRow {
    double gamma = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double loss = 0.0;
};

struct TrendReport {
    std::vector<TrendRow> rows;
    bool loss_decreasing = true;
    bool alpha_increasing = true;
    bool beta_increasing = true;
    bool beta_below_one = true;

    [[nodiscard]] bool holds() const { return loss_decreasing && alpha_increasing && beta_increasing && beta_below_one; }
};

// prop2_solve along an increasing gamma schedule.
[[nodiscard]] TrendReport sparsification_trend(std::vector<double> const& u, std::vector<double> const& gammas);

} // namespace opgfn::theory
