// Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion.
// Usage: opgfn_acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gfn_fixtures.hpp"
#include "opgfn/ad/gradcheck.hpp"
#include "opgfn/cli/commands.hpp"
#include "opgfn/env/factory.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/gfn/composite.hpp"
#include "opgfn/gfn/exact.hpp"
#include "opgfn/gfn/losses.hpp"
#include "opgfn/gfn/order_preserving.hpp"
#include "opgfn/metrics/indicators.hpp"
#include "opgfn/metrics/reference.hpp"
#include "opgfn/theory/chain.hpp"
#include "opgfn/theory/flow.hpp"
#include "opgfn/train/sampler.hpp"
#include "opgfn/train/trainer.hpp"
#include "opgfn/util/format.hpp"
#include "opgfn/util/hash.hpp"

using namespace opgfn;

namespace {

// Pinned tolerances.
constexpr double c1_log_tol = 1e-3;
constexpr double c1_loss_tol = 1e-10;
constexpr double c2_ratio_tol = 1e-3;
constexpr double c2_beta_tol = 1e-6;
constexpr double c2_gamma = 1e6;
constexpr double c3_flow_tol = 1e-12;
constexpr double c4_l1_max = 0.1;
constexpr double c6_igd_plus_max = 0.01;
constexpr double c6_d_h_max = 0.05;
constexpr double c7_oracle_tol = 1e-12;
constexpr double c7_mc_se = 3.0;
constexpr std::size_t c7_mc_samples = 1'000'000;
constexpr double c8_rel_tol = 1e-4;
constexpr std::size_t c8_coords = 64;

std::string fmt(double x) { return util::format_double(x); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------- theory

Outcome criterion1() {
    double worst_log = 0.0;
    double worst_loss = 0.0;
    std::string example;
    for (std::size_t n : {2U, 4U, 8U}) {
        for (double gamma : {10.0, 1e3}) {
            auto const s = theory::prop1_closed_form(n, gamma);
            std::vector<theory::Link> const links(n, theory::Link::strict);
            auto const res = theory::minimize_chain(links, gamma);
            for (std::size_t i = 0; i <= n; ++i) {
                worst_log = std::max(worst_log, std::abs(res.log_r[i] - std::log(s.rewards[i])));
            }
            double const stated = theory::prop1_stated_loss(n, gamma);
            double const gap = std::abs(res.loss - stated);
            if (gap > worst_loss) {
                worst_loss = gap;
                example = "n=" + std::to_string(n) + " gamma=" + fmt(gamma) + ": minimum " + fmt(res.loss) +
                          " vs n*log(1+1/gamma) " + fmt(stated);
            }
        }
    }
    bool const rewards_ok = worst_log < c1_log_tol;
    bool const loss_ok = worst_loss < c1_loss_tol;
    return {rewards_ok && loss_ok, "max |log R deviation| " + fmt(worst_log) + (rewards_ok ? " (ok)" : " (too large)") +
                                       "; loss " + (loss_ok ? "matches" : "mismatch, worst " + example)};
}

Outcome criterion2() {
    std::mt19937_64 rng(2);
    std::size_t solved = 0;
    double ratio_spread = 0.0;
    double beta_dev = 0.0;
    while (solved < 50) {
        auto const n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        std::vector<double> u{0.0};
        for (std::size_t i = 0; i < n; ++i) { u.push_back(u.back() + static_cast<double>(std::uniform_int_distribution<int>(0, 1)(rng))); }
        theory::RankedChain const chain{u, c2_gamma, true};
        if (theory::gamma0(chain.m(), n) >= c2_gamma) { continue; }
        ++solved;
        std::vector<theory::Link> full{theory::Link::strict};
        auto const links = chain.links();
        full.insert(full.end(), links.begin(), links.end());
        full.push_back(theory::Link::strict);
        auto const res = theory::minimize_chain(full, c2_gamma);
        std::vector<double> up;
        std::vector<double> tie;
        for (std::size_t j = 0; j < full.size(); ++j) {
            (full[j] == theory::Link::strict ? up : tie).push_back(res.log_r[j + 1] - res.log_r[j]);
        }
        for (auto const* v : {&up, &tie}) {
            if (v->empty()) { continue; }
            auto [lo, hi] = std::minmax_element(v->begin(), v->end());
            ratio_spread = std::max(ratio_spread, *hi - *lo);
        }
        if (!tie.empty()) {
            double const alpha = std::exp(std::accumulate(up.begin(), up.end(), 0.0) / static_cast<double>(up.size()));
            double const beta = std::exp(std::accumulate(tie.begin(), tie.end(), 0.0) / static_cast<double>(tie.size()));
            beta_dev = std::max(beta_dev, std::abs(beta - (alpha - 1.0) / (alpha + 3.0)));
        }
    }
    return {ratio_spread < c2_ratio_tol && beta_dev < c2_beta_tol,
            "50 chains; max log-ratio spread " + fmt(ratio_spread) + ", max |beta - (alpha-1)/(alpha+3)| " + fmt(beta_dev)};
}

Outcome criterion3() {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (std::size_t l = 1; l <= 6; ++l) {
        for (std::size_t k = 1; k <= l; ++k) {
            double const reward = std::uniform_real_distribution<double>(0.01, 10.0)(rng);
            double const ef = reward * theory::expected_flow_fraction_bruteforce(l, k);
            worst = std::max(worst, std::abs(ef - reward / static_cast<double>(l - k + 1)));
        }
    }
    std::size_t checked = 0;
    std::size_t separated = 0;
    double bf_gap = 0.0;
    auto tally = [&](theory::SeparationReport const& r) {
        bf_gap = std::max({bf_gap, std::abs(r.flow_shared_bruteforce - r.flow_shared),
                           std::abs(r.flow_competitor_bruteforce - r.flow_competitor)});
        if (!r.alpha_above_four()) { return; }
        ++checked;
        separated += r.separated ? 1 : 0;
    };
    for (std::size_t n = 1; n <= 4; ++n) {
        for (double gamma = 10.0; gamma <= 1e12; gamma *= 10.0) {
            try {
                tally(theory::prop3_expected_flow(6, 3, n, gamma));
            } catch (PreconditionError const&) {}
        }
        for (double alpha = 4.0 + 1e-9; alpha < 100.0; alpha *= 1.1) { tally(theory::prop3_from_alpha(6, 3, n, alpha)); }
    }
    bool const ok = worst < c3_flow_tol && bf_gap < c3_flow_tol && checked > 0 && separated == checked;
    return {ok, "enumeration max |E F - R/(l-k+1)| " + fmt(worst) + " (l<=6); separation " + std::to_string(separated) +
                    "/" + std::to_string(checked) + " cases with alpha > 4"};
}

// ---------------------------------------------------------------- training

struct GridRun {
    std::unique_ptr<env::Environment> env;
    std::unique_ptr<gfn::FlowModel> model;
    train::TrainResult result;
};

env::EnvSpec grid_spec(int side, std::vector<std::string> objectives = {}) {
    env::EnvSpec s;
    s.kind = env::EnvKind::hypergrid;
    s.dim = 2;
    s.side = side;
    s.r0 = 0.1;
    s.objectives = std::move(objectives);
    return s;
}

train::TrainPlan grid_plan(std::uint64_t seed, std::size_t rounds) {
    train::TrainPlan p;
    p.seed = seed;
    p.n_init = 200;
    p.n_rounds = rounds;
    p.n_new = 200;
    p.batch_size = 200;
    p.lr = 0.1;
    p.lr_log_z = 0.1;
    return p;
}

GridRun run_grid(env::EnvSpec const& es, gfn::LossConfig const& loss, train::TrainPlan const& plan) {
    GridRun r;
    r.env = env::make_environment(es);
    gfn::ModelSpec ms;
    ms.type = gfn::ModelType::tabular;
    ms.seed = plan.seed;
    r.model = std::make_unique<gfn::FlowModel>(*r.env, ms, loss.backward);
    train::Trainer trainer(*r.env, *r.model, plan, loss);
    r.result = trainer.run();
    return r;
}

gfn::LossConfig tb_loss(bool op) {
    gfn::LossConfig c;
    c.criterion = gfn::Criterion::tb;
    c.order_preserving = op;
    c.beta = 1.0;
    return c;
}

Outcome criterion4() {
    auto const r = run_grid(grid_spec(8), tb_loss(false), grid_plan(0, 500));
    double const l1 = r.result.log.rows.back().l1;
    return {!r.result.aborted && l1 <= c4_l1_max,
            "L1(last 1e5 samples, R/Z) after 500 rounds x 200 = " + fmt(l1) + " (limit " + fmt(c4_l1_max) + ")"};
}

Outcome criterion5() {
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto const op = run_grid(grid_spec(8), tb_loss(true), grid_plan(seed, 500));
        auto const tb = run_grid(grid_spec(8), tb_loss(false), grid_plan(seed, 500));
        double const a = op.result.log.rows.back().r3;
        double const b = tb.result.log.rows.back().r3;
        wins += a > b ? 1 : 0;
        detail += (seed > 0 ? ", " : "") + fmt(a) + " vs " + fmt(b);
    }
    return {wins >= 4, "OP-TB r3 above TB in " + std::to_string(wins) + "/5 seeds (" + detail + ")"};
}

Outcome criterion6() {
    auto es = grid_spec(32, {"branin", "currin"});
    auto plan = grid_plan(0, 500);
    plan.n_init = plan.n_new = plan.batch_size = 128;
    plan.replay_resample = true;
    auto const r = run_grid(es, tb_loss(true), plan);
    cli::RunConfig cfg;
    cfg.seed = 0;
    std::vector<env::ObjectiveVector> s;
    for (std::size_t round = 0; round < 10; ++round) {
        for (auto const& t : cli::sample_candidates(cfg, *r.env, *r.model, round, 128)) { s.push_back(t.objective); }
    }
    auto const front = metrics::reference_front(*r.env);
    auto const rep = metrics::evaluate_indicators(s, front.points, {});
    return {!r.result.aborted && rep.igd_plus <= c6_igd_plus_max && rep.d_h <= c6_d_h_max,
            std::to_string(s.size()) + " candidates: IGD+ " + fmt(rep.igd_plus) + " (limit " + fmt(c6_igd_plus_max) +
                "), d_H " + fmt(rep.d_h) + " (limit " + fmt(c6_d_h_max) + ")"};
}

// ---------------------------------------------------------------- indicators

using Points = std::vector<std::vector<double>>;

Points random_points(std::mt19937_64& g, std::size_t n, std::size_t d) {
    Points p(n, std::vector<double>(d));
    for (auto& x : p) {
        for (auto& v : x) { v = std::uniform_real_distribution<double>(0.0, 1.0)(g); }
    }
    return p;
}

double oracle_dist(std::vector<double> const& a, std::vector<double> const& b, bool plus) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = plus ? std::max(b[i] - a[i], 0.0) : a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Mean over `from` of the distance to the nearest point of `to`; for the
// plus variant the shortfall is measured from the candidate to the reference.
double oracle_mean_min(Points const& from, Points const& to, bool plus, bool from_is_candidate) {
    double total = 0.0;
    for (auto const& a : from) {
        double best = INFINITY;
        for (auto const& b : to) {
            double const d = from_is_candidate ? oracle_dist(a, b, plus) : oracle_dist(b, a, plus);
            best = std::min(best, d);
        }
        total += best;
    }
    return total / static_cast<double>(from.size());
}

Points oracle_front(Points const& s) {
    Points out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < s.size() && !dominated; ++j) {
            bool ge = true;
            bool gt = false;
            for (std::size_t d = 0; d < s[i].size(); ++d) {
                ge = ge && s[j][d] >= s[i][d];
                gt = gt || s[j][d] > s[i][d];
            }
            dominated = ge && gt;
        }
        if (!dominated) { out.push_back(s[i]); }
    }
    return out;
}

double oracle_r2(Points const& s, Points const& weights) {
    double total = 0.0;
    for (auto const& w : weights) {
        double best = INFINITY;
        for (auto const& x : s) {
            double worst = 0.0;
            for (std::size_t d = 0; d < x.size(); ++d) { worst = std::max(worst, w[d] * std::abs(1.0 - x[d])); }
            best = std::min(best, worst);
        }
        total += best;
    }
    return total / static_cast<double>(weights.size());
}

Outcome criterion7() {
    std::mt19937_64 g(7);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        std::size_t const d = 2 + static_cast<std::size_t>(inst % 3);
        auto const s = random_points(g, 5 + static_cast<std::size_t>(inst % 20), d);
        auto const p = oracle_front(random_points(g, 30, d));
        auto const est = oracle_front(s);
        double const gd = oracle_mean_min(s, p, false, true);
        double const igd = oracle_mean_min(p, s, false, false);
        double const gdp = oracle_mean_min(est, p, true, true);
        double const igdp = oracle_mean_min(p, est, true, false);
        auto const w = metrics::das_dennis(d, 10);
        double const r2 = oracle_r2(est, w);
        for (auto [got, want] : std::initializer_list<std::pair<double, double>>{
                 {metrics::gd(s, p), gd}, {metrics::igd(s, p), igd}, {metrics::gd_plus(est, p), gdp},
                 {metrics::igd_plus(est, p), igdp}, {metrics::d_h(s, p), std::max(gd, igd)},
                 {metrics::r2_indicator(est, w, std::vector<double>(d, 1.0)), r2}}) {
            worst = std::max(worst, std::abs(got - want));
        }
    }
    std::size_t mc_fail = 0;
    double worst_z = 0.0;
    for (std::size_t d : {2U, 3U}) {
        for (int inst = 0; inst < 4; ++inst) {
            auto const front = oracle_front(random_points(g, 12, d));
            std::vector<double> const ref(d, 0.0);
            double const hv = metrics::hypervolume(front, ref);
            std::size_t hits = 0;
            std::vector<double> x(d);
            for (std::size_t i = 0; i < c7_mc_samples; ++i) {
                for (auto& v : x) { v = std::uniform_real_distribution<double>(0.0, 1.0)(g); }
                bool const dom = std::any_of(front.begin(), front.end(), [&](auto const& f) {
                    for (std::size_t k = 0; k < d; ++k) {
                        if (f[k] < x[k]) { return false; }
                    }
                    return true;
                });
                hits += dom ? 1 : 0;
            }
            double const p = static_cast<double>(hits) / static_cast<double>(c7_mc_samples);
            double const se = std::sqrt(p * (1.0 - p) / static_cast<double>(c7_mc_samples));
            double const z = std::abs(hv - p) / se;
            worst_z = std::max(worst_z, z);
            mc_fail += z > c7_mc_se ? 1 : 0;
        }
    }
    std::size_t compliance_fail = 0;
    for (int inst = 0; inst < 100; ++inst) {
        std::size_t const d = 2 + static_cast<std::size_t>(inst % 2);
        auto const p = oracle_front(random_points(g, 20, d));
        auto const a = random_points(g, 10, d);
        // B is weakly dominated by A: a subset of A with every point pushed down.
        Points b(a.begin(), a.begin() + 5);
        for (auto& x : b) {
            for (auto& v : x) { v -= std::uniform_real_distribution<double>(0.0, 0.2)(g); }
        }
        if (metrics::igd_plus(a, p) > metrics::igd_plus(b, p) + 1e-15) { ++compliance_fail; }
    }
    return {worst < c7_oracle_tol && mc_fail == 0 && compliance_fail == 0,
            "max oracle deviation " + fmt(worst) + " over 100 instances; HV vs Monte Carlo worst z " + fmt(worst_z) +
                " (8 fronts); IGD+ compliance failures " + std::to_string(compliance_fail) + "/100"};
}

// ---------------------------------------------------------------- gradients

Outcome criterion8() {
    auto grid = testing::make_grid(2, 4, 0.1);
    double worst = 0.0;
    std::size_t checks = 0;
    auto check = [&](gfn::FlowModel& m, ad::LossBuilder const& build, std::uint64_t seed) {
        auto const coords = ad::random_coordinates(m.params().size(), c8_coords, seed);
        auto const r = ad::gradcheck(m.params(), build, coords);
        worst = std::max(worst, r.fd_norm > 0.0 ? r.relative_error : INFINITY);
        ++checks;
    };
    auto rollouts = [&](gfn::FlowModel const& m, std::uint64_t seed) {
        std::mt19937_64 g(seed);
        std::vector<gfn::Trajectory> out;
        for (int i = 0; i < 6; ++i) { out.push_back(train::sample_trajectory(*grid, m, {0.5, 1.0}, g)); }
        return out;
    };
    for (auto type : {gfn::ModelType::tabular, gfn::ModelType::mlp}) {
        auto spec = type == gfn::ModelType::tabular ? testing::tabular_spec() : testing::small_mlp_spec(3);
        gfn::FlowModel m(*grid, spec, gfn::BackwardMode::trainable_kl);
        testing::randomize(m, 31, 0.4);
        auto const batch = rollouts(m, 77);
        auto const& t = batch.front();
        double const target = std::log(t.objective[0]);
        check(m, [&](ad::Tape& tp) { return gfn::tb_loss(tp, m, t, target); }, 1);
        check(m, [&](ad::Tape& tp) { return gfn::db_loss(tp, m, t, std::nullopt); }, 2);
        check(m, [&](ad::Tape& tp) { return gfn::subtb_loss(tp, m, t, 0.9, target); }, 3);
        check(m, [&](ad::Tape& tp) { return gfn::kl_reg(tp, m, t); }, 4);
        std::vector<env::ObjectiveVector> u;
        for (auto const& x : batch) { u.push_back({x.objective[0], 1.0 - x.objective[0]}); }
        check(m, [&](ad::Tape& tp) {
            std::vector<ad::Var> lr;
            for (auto const& x : batch) { lr.push_back(gfn::tb_log_reward(tp, m, x)); }
            return gfn::op_loss_pareto(lr, u);
        }, 5);
        std::vector<double> const su{0.1, 0.4, 0.4, 0.2, 0.9, 0.3};
        auto const pairs = gfn::make_pairs(su, gfn::Pairing::all_pairs);
        check(m, [&](ad::Tape& tp) {
            std::vector<ad::Var> lr;
            for (auto const& x : batch) { lr.push_back(gfn::learned_log_reward(tp, m, x, gfn::Criterion::db)); }
            return gfn::op_loss_pairwise(lr, su, pairs);
        }, 6);
        for (auto crit : {gfn::Criterion::tb, gfn::Criterion::db, gfn::Criterion::subtb}) {
            for (bool op : {true, false}) {
                gfn::LossConfig c;
                c.criterion = crit;
                c.order_preserving = op;
                c.backward = gfn::BackwardMode::trainable_kl;
                c.lambda_kl = 0.5;
                check(m, [&](ad::Tape& tp) { return gfn::composite_loss(tp, m, batch, c).total; }, 7);
            }
        }
    }
    gfn::FlowModel fm(*grid, testing::small_mlp_spec(5), gfn::BackwardMode::uniform);
    testing::randomize(fm, 41, 0.4);
    auto const batch = rollouts(fm, 79);
    check(fm, [&](ad::Tape& tp) { return gfn::fm_loss(tp, fm, batch[0], -0.5); }, 8);
    gfn::LossConfig c;
    c.criterion = gfn::Criterion::fm;
    check(fm, [&](ad::Tape& tp) { return gfn::composite_loss(tp, fm, batch, c).total; }, 9);
    return {worst < c8_rel_tol, std::to_string(checks) + " checks (tabular and MLP); worst relative error " + fmt(worst)};
}

// ---------------------------------------------------------------- KL, boosting

Outcome criterion9() {
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto reg_loss = tb_loss(true);
        reg_loss.backward = gfn::BackwardMode::trainable_kl;
        reg_loss.lambda_kl = 1.0;
        auto free_loss = tb_loss(true);
        free_loss.backward = gfn::BackwardMode::trainable;
        auto const reg = run_grid(grid_spec(8), reg_loss, grid_plan(seed, 200));
        auto const free = run_grid(grid_spec(8), free_loss, grid_plan(seed, 200));
        double const a = gfn::mean_backward_kl(*reg.model);
        double const b = gfn::mean_backward_kl(*free.model);
        wins += a < b ? 1 : 0;
        detail += (seed > 0 ? ", " : "") + fmt(a) + " vs " + fmt(b);
    }
    return {wins >= 4, "mean KL(P_B || uniform) with lambda_KL=1 below the unregularized run in " + std::to_string(wins) +
                           "/5 seeds (" + detail + ")"};
}

Outcome criterion10() {
    auto const r = run_grid(grid_spec(8), tb_loss(true), grid_plan(0, 500));
    std::size_t const k = 8;
    std::size_t const big_k = 8 * k;
    double boosted = 0.0;
    double plain = 0.0;
    for (std::uint64_t draw = 0; draw < 100; ++draw) {
        std::mt19937_64 rb(util::derive_seed(10, draw, 1));
        for (auto const& t : train::boost_sample(*r.env, *r.model, gfn::Criterion::tb, {}, big_k, k, rb)) {
            boosted += r.env->objective(t.terminal())[0];
        }
        std::mt19937_64 rp(util::derive_seed(10, draw, 2));
        for (std::size_t i = 0; i < k; ++i) { plain += train::sample_trajectory(*r.env, *r.model, {}, rp).objective[0]; }
    }
    boosted /= 100.0 * static_cast<double>(k);
    plain /= 100.0 * static_cast<double>(k);
    return {boosted >= plain, "mean u boosted (r_boost=8) " + fmt(boosted) + " vs unboosted " + fmt(plain) + " over 100 draws"};
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<std::string, std::function<Outcome()>>> const criteria{
        {"closed form on an all-distinct chain", criterion1},
        {"piecewise structure on random chains", criterion2},
        {"substring flow enumeration and separation", criterion3},
        {"tabular TB converges to R/Z", criterion4},
        {"OP-TB concentrates on maximal states", criterion5},
        {"branin-currin front recovery", criterion6},
        {"indicator oracles", criterion7},
        {"gradient integrity", criterion8},
        {"backward KL regularization", criterion9},
        {"boosted sampling", criterion10},
    };
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        auto const n = std::strtoul(argv[i], nullptr, 10);
        if (n < 1 || n > criteria.size()) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 2;
        }
        selected.push_back(n - 1);
    }
    if (selected.empty()) {
        selected.resize(criteria.size());
        std::iota(selected.begin(), selected.end(), 0);
    }
    int failures = 0;
    for (auto i : selected) {
        auto const start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (std::exception const& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s [%zu] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
