#include "opgfn/theory/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opgfn/errors.hpp"
#include "opgfn/util/format.hpp"

namespace opgfn::theory {

std::vector<Link> RankedChain::links() const {
    std::vector<Link> out;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        if (u[i + 1] < u[i]) { throw ContractViolation("ranked chain must be sorted ascending"); }
        out.push_back(u[i] < u[i + 1] ? Link::strict : Link::tie);
    }
    return out;
}

std::size_t RankedChain::m() const {
    auto const l = links();
    return static_cast<std::size_t>(std::count(l.begin(), l.end(), Link::strict));
}

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
    if (x >= 0) { return 1.0 / (1.0 + std::exp(-x)); }
    double const e = std::exp(x);
    return e / (1.0 + e);
}

void check_sizes(std::span<double const> log_r, std::span<Link const> links) {
    if (log_r.size() != links.size() + 1) { throw ContractViolation("chain needs one more value than links"); }
}

// Cholesky solve of a small symmetric positive definite system.
std::vector<double> spd_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) { d -= a[j * n + k] * a[j * n + k]; }
        if (!(d > 0.0)) { throw ContractViolation("Newton system is not positive definite"); }
        d = std::sqrt(d);
        a[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) { s -= a[i * n + k] * a[j * n + k]; }
            a[i * n + j] = s / d;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) { b[i] -= a[i * n + k] * b[k]; }
        b[i] /= a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) { b[i] -= a[k * n + i] * b[k]; }
        b[i] /= a[i * n + i];
    }
    return b;
}

} // namespace

double chain_loss(std::span<double const> log_r, std::span<Link const> links) {
    check_sizes(log_r, links);
    double total = 0.0;
    for (std::size_t j = 0; j < links.size(); ++j) {
        double const d = log_r[j] - log_r[j + 1];
        total += links[j] == Link::strict ? softplus(d) : -std::log(2.0) + 0.5 * softplus(d) + 0.5 * softplus(-d);
    }
    return total;
}

std::vector<double> chain_loss_gradient(std::span<double const> log_r, std::span<Link const> links) {
    check_sizes(log_r, links);
    std::vector<double> g(log_r.size(), 0.0);
    for (std::size_t j = 0; j < links.size(); ++j) {
        double const d = log_r[j] - log_r[j + 1];
        double const s = links[j] == Link::strict ? sigmoid(d) : sigmoid(d) - 0.5;
        g[j] += s;
        g[j + 1] -= s;
    }
    return g;
}

MinimizeResult minimize_chain(std::span<Link const> links, double gamma, std::size_t max_iter) {
    if (!(gamma > 1.0)) { throw ContractViolation("chain minimization needs gamma > 1"); }
    std::size_t const n = links.size() + 1;
    double const lo = -std::log(gamma);
    auto project = [lo](double x) { return std::clamp(x, lo, 0.0); };
    MinimizeResult res;
    res.log_r.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        res.log_r[i] = n == 1 ? 0.0 : lo * (1.0 - static_cast<double>(i) / static_cast<double>(n - 1));
    }
    auto& x = res.log_r;
    double f = chain_loss(x, links);
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        auto const g = chain_loss_gradient(x, links);
        double pg = 0.0;
        for (std::size_t i = 0; i < n; ++i) { pg = std::max(pg, std::abs(x[i] - project(x[i] - g[i]))); }
        if (pg < 1e-14) {
            res.converged = true;
            break;
        }
        // Coordinates held at a face with the gradient pushing outward stay fixed.
        double const eps = 1e-12;
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i) {
            bool const at_lo = x[i] <= lo + eps && g[i] > 0.0;
            bool const at_hi = x[i] >= -eps && g[i] < 0.0;
            if (!at_lo && !at_hi) { free.push_back(i); }
        }
        std::vector<double> dir(n, 0.0);
        if (!free.empty()) {
            std::size_t const k = free.size();
            std::vector<double> h(k * k, 0.0);
            std::vector<double> pos(n, -1.0);
            for (std::size_t a = 0; a < k; ++a) { pos[free[a]] = static_cast<double>(a); }
            double diag_max = 0.0;
            for (std::size_t j = 0; j < links.size(); ++j) {
                double const s = sigmoid(x[j] - x[j + 1]);
                double const w = s * (1.0 - s);
                auto const pa = pos[j];
                auto const pb = pos[j + 1];
                if (pa >= 0) { h[static_cast<std::size_t>(pa) * (k + 1)] += w; }
                if (pb >= 0) { h[static_cast<std::size_t>(pb) * (k + 1)] += w; }
                if (pa >= 0 && pb >= 0) {
                    h[static_cast<std::size_t>(pa) * k + static_cast<std::size_t>(pb)] -= w;
                    h[static_cast<std::size_t>(pb) * k + static_cast<std::size_t>(pa)] -= w;
                }
            }
            for (std::size_t a = 0; a < k; ++a) { diag_max = std::max(diag_max, h[a * (k + 1)]); }
            for (std::size_t a = 0; a < k; ++a) { h[a * (k + 1)] += 1e-12 * (1.0 + diag_max); }
            std::vector<double> rhs(k);
            for (std::size_t a = 0; a < k; ++a) { rhs[a] = -g[free[a]]; }
            auto const step = spd_solve(h, rhs, k);
            for (std::size_t a = 0; a < k; ++a) { dir[free[a]] = step[a]; }
        }
        auto try_direction = [&](std::vector<double> const& d) {
            double t = 1.0;
            for (int halvings = 0; halvings < 80; ++halvings, t *= 0.5) {
                std::vector<double> y(n);
                double decrease = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    y[i] = project(x[i] + t * d[i]);
                    decrease += g[i] * (y[i] - x[i]);
                }
                double const fy = chain_loss(y, links);
                // Near the optimum the predicted decrease falls below the
                // rounding of f; the Armijo test is then meaningless.
                bool const noise = halvings == 0 && -decrease < 1e-13 * (1.0 + std::abs(f));
                if (fy <= f + 1e-4 * decrease || noise) {
                    bool const moved = y != x;
                    x = std::move(y);
                    f = fy;
                    return moved;
                }
            }
            return false;
        };
        if (!try_direction(dir)) {
            std::vector<double> steepest(n);
            for (std::size_t i = 0; i < n; ++i) { steepest[i] = -g[i]; }
            if (!try_direction(steepest)) {
                res.converged = pg < 1e-10;
                break;
            }
        }
    }
    res.loss = chain_loss(x, links);
    return res;
}

ChainSolution prop1_closed_form(std::size_t n, double gamma) {
    if (n == 0 || !(gamma > 1.0)) { throw ContractViolation("prop1 needs n >= 1 and gamma > 1"); }
    ChainSolution s;
    std::vector<double> log_r(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        log_r[i] = (static_cast<double>(i) / static_cast<double>(n) - 1.0) * std::log(gamma);
        s.rewards.push_back(std::exp(log_r[i]));
    }
    s.alpha = std::pow(gamma, 1.0 / static_cast<double>(n));
    s.beta = beta_of(s.alpha);
    std::vector<Link> const links(n, Link::strict);
    s.loss = chain_loss(log_r, links);
    return s;
}

double prop1_stated_loss(std::size_t n, double gamma) { return static_cast<double>(n) * std::log1p(1.0 / gamma); }

double log_f1(double alpha, std::size_t m, std::size_t n) {
    if (!(alpha > 1.0)) { return -std::numeric_limits<double>::infinity(); }
    double const ties = static_cast<double>(n - m);
    return static_cast<double>(m + 2) * std::log(alpha) + (ties > 0 ? ties * std::log(beta_of(alpha)) : 0.0);
}

double gamma0(std::size_t m, std::size_t n) {
    if (m > n) { throw ContractViolation("m cannot exceed n"); }
    if (m == n) { return 1.0; }
    auto g = [&](double log_gamma) {
        return log_f1(std::exp(log_gamma / static_cast<double>(m + 1)), m, n) - log_gamma;
    };
    double lo = std::log1p(1e-9);
    double hi = std::log(1e12);
    if (g(hi) <= 0.0) { throw PreconditionError("gamma0 lies above 1e12"); }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        double const mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    return std::exp(hi);
}

double alpha_gamma(std::size_t m, std::size_t n, double gamma) {
    if (m > n) { throw ContractViolation("m cannot exceed n"); }
    if (!(gamma > 1.0)) { throw ContractViolation("alpha_gamma needs gamma > 1"); }
    double const target = std::log(gamma);
    double lo = 1.0;
    double hi = 2.0;
    while (log_f1(hi, m, n) < target) { hi *= 2.0; }
    for (int it = 0; it < 400 && hi - lo > 1e-14 * hi; ++it) {
        double const mid = 0.5 * (lo + hi);
        (log_f1(mid, m, n) >= target ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double prop2_loss(double alpha, std::size_t m, std::size_t n) {
    double const beta = beta_of(alpha);
    double const ties = static_cast<double>(n - m);
    double const tie_term = ties > 0 ? -0.5 * ties * std::log(beta / ((1.0 + beta) * (1.0 + beta))) : 0.0;
    return tie_term - static_cast<double>(m + 2) * std::log(alpha / (1.0 + alpha)) - ties * std::log(2.0);
}

ChainSolution prop2_solve(RankedChain const& chain) {
    if (chain.u.size() < 2) { throw ContractViolation("ranked chain needs at least two members"); }
    if (!chain.auxiliaries) { throw ContractViolation("the piecewise solution is stated with auxiliary members"); }
    auto const links = chain.links();
    std::size_t const n = chain.n();
    std::size_t const m = chain.m();
    ChainSolution s;
    s.gamma0 = gamma0(m, n);
    if (!(chain.gamma > s.gamma0)) {
        throw PreconditionError("gamma " + util::format_double(chain.gamma) + " must exceed gamma0 = " +
                                util::format_double(s.gamma0));
    }
    s.alpha = alpha_gamma(m, n, chain.gamma);
    s.beta = beta_of(s.alpha);
    s.aux_low = 1.0 / chain.gamma;
    std::vector<double> log_r{std::log(s.aux_low)};
    double lr = std::log(s.alpha) - std::log(chain.gamma);
    log_r.push_back(lr);
    for (auto l : links) {
        lr += std::log(l == Link::strict ? s.alpha : s.beta);
        log_r.push_back(lr);
    }
    log_r.push_back(0.0);
    s.aux_high = 1.0;
    for (std::size_t i = 1; i + 1 < log_r.size(); ++i) { s.rewards.push_back(std::exp(log_r[i])); }
    std::vector<Link> full{Link::strict};
    full.insert(full.end(), links.begin(), links.end());
    full.push_back(Link::strict);
    s.loss = chain_loss(log_r, full);
    return s;
}

TrendReport sparsification_trend(std::vector<double> const& u, std::vector<double> const& gammas) {
    TrendReport r;
    for (double gamma : gammas) {
        auto const s = prop2_solve(RankedChain{u, gamma, true});
        TrendRow row{gamma, s.alpha, s.beta, s.loss};
        if (!r.rows.empty()) {
            auto const& prev = r.rows.back();
            if (!(gamma > prev.gamma)) { throw ContractViolation("gamma schedule must increase"); }
            r.loss_decreasing = r.loss_decreasing && row.loss < prev.loss;
            r.alpha_increasing = r.alpha_increasing && row.alpha > prev.alpha;
            r.beta_increasing = r.beta_increasing && row.beta > prev.beta;
        }
        r.beta_below_one = r.beta_below_one && row.beta < 1.0;
        r.rows.push_back(row);
    }
    return r;
}

} // namespace opgfn::theory
