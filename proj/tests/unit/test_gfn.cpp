#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gfn_fixtures.hpp"
#include "opgfn/ad/gradcheck.hpp"
#include "opgfn/ad/softmax.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/gfn/composite.hpp"
#include "opgfn/gfn/exact.hpp"
#include "opgfn/gfn/losses.hpp"
#include "opgfn/gfn/order_preserving.hpp"
#include "opgfn/train/sampler.hpp"
#include "test_util.hpp"

using namespace opgfn;
using namespace opgfn::gfn;
using opgfn::testing::make_grid;
using opgfn::testing::make_path;

namespace {

std::vector<ad::Var> constants(ad::Tape& tape, std::vector<double> const& xs) {
    std::vector<ad::Var> out;
    for (double x : xs) { out.push_back(tape.constant(x)); }
    return out;
}

double brute_pareto_kl(std::vector<double> const& log_r, std::vector<env::ObjectiveVector> const& u) {
    std::size_t const n = u.size();
    std::vector<double> py(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < n; ++j) { dominated = dominated || env::strictly_dominated(u[i], u[j]); }
        py[i] = dominated ? 0.0 : 1.0;
    }
    double const k = std::accumulate(py.begin(), py.end(), 0.0);
    double z = 0.0;
    for (double l : log_r) { z += std::exp(l); }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (py[i] == 0.0) { continue; }
        double const p = py[i] / k;
        kl += p * std::log(p / (std::exp(log_r[i]) / z));
    }
    return kl;
}

} // namespace

TEST_CASE("pareto loss: incomparable pair with equal rewards is zero") {
    ad::ParamStore dummy;
    ad::Tape tape(dummy);
    std::vector<env::ObjectiveVector> u{{1.0, 0.0}, {0.0, 1.0}};
    auto const l = op_loss_pareto(constants(tape, {0.3, 0.3}), u);
    CHECK(l.value() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("pareto loss: dominated pair with rewards 1/16 and 1") {
    ad::ParamStore dummy;
    ad::Tape tape(dummy);
    std::vector<env::ObjectiveVector> u{{0.2, 0.2}, {0.5, 0.5}};
    auto const l = op_loss_pareto(constants(tape, {std::log(1.0 / 16.0), 0.0}), u);
    CHECK(l.value() == doctest::Approx(std::log(17.0 / 16.0)).epsilon(1e-14));
    CHECK_THROWS_AS((void)op_loss_pareto(constants(tape, {0.0}), std::vector<env::ObjectiveVector>{{1.0}}),
                    ContractViolation);
}

TEST_CASE("pareto loss matches explicit probability vectors") {
    auto g = testing::rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        // Two incomparable points on top, two dominated ones below.
        std::vector<env::ObjectiveVector> u{{0.9, 0.5}, {0.3, 0.2}, {0.5, 0.9}, {0.4, 0.4}};
        auto const log_r = testing::uniform_vector(g, 4, -3.0, 3.0);
        CHECK(op_loss_pareto_value(log_r, u) == doctest::Approx(brute_pareto_kl(log_r, u)).epsilon(1e-12));
        ad::ParamStore dummy;
        ad::Tape tape(dummy);
        CHECK(op_loss_pareto(constants(tape, log_r), u).value() ==
              doctest::Approx(brute_pareto_kl(log_r, u)).epsilon(1e-12));
    }
}

TEST_CASE("pareto membership keeps duplicates") {
    std::vector<env::ObjectiveVector> u{{1.0, 1.0}, {1.0, 1.0}, {0.5, 0.5}};
    auto const y = pareto_membership(u);
    CHECK(y == std::vector<bool>{true, true, false});
}

TEST_CASE("pairwise labels and equal rewards") {
    CHECK(pairwise_label(2.0, 1.0) == 1.0);
    CHECK(pairwise_label(1.0, 2.0) == 0.0);
    CHECK(pairwise_label(1.0, 1.0) == 0.5);
    std::vector<double> u{0.5, 0.5};
    std::vector<IndexPair> pairs{{0, 1}};
    CHECK(op_loss_pairwise_value(std::vector<double>{0.1, 0.1}, u, pairs) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("pairwise loss on a geometric chain") {
    // Neighbour ratio gamma^(1/n): each pair costs log(1 + gamma^(-1/n)).
    for (int n : {1, 2, 4, 8}) {
        for (double gamma : {10.0, 16.0, 1000.0}) {
            std::vector<double> u(static_cast<std::size_t>(n) + 1);
            std::vector<double> log_r(u.size());
            for (int i = 0; i <= n; ++i) {
                u[static_cast<std::size_t>(i)] = i;
                log_r[static_cast<std::size_t>(i)] = (static_cast<double>(i) / n - 1.0) * std::log(gamma);
            }
            auto const pairs = make_pairs(u, Pairing::sorted_neighbors);
            CHECK(pairs.size() == static_cast<std::size_t>(n));
            double const expected = n * std::log1p(std::pow(gamma, -1.0 / n));
            CHECK(op_loss_pairwise_value(log_r, u, pairs) == doctest::Approx(expected).epsilon(1e-13));
        }
    }
    // n = 4, gamma = 16: every neighbour ratio is 2, so the sum is 4 log(3/2).
    std::vector<double> u{0, 1, 2, 3, 4};
    std::vector<double> log_r;
    for (int i = 0; i <= 4; ++i) { log_r.push_back((i / 4.0 - 1.0) * std::log(16.0)); }
    CHECK(op_loss_pairwise_value(log_r, u, make_pairs(u, Pairing::sorted_neighbors)) ==
          doctest::Approx(4.0 * std::log(1.5)).epsilon(1e-14));
}

TEST_CASE("make_pairs orders by value and all-pairs enumerates every pair") {
    std::vector<double> u{0.3, 0.1, 0.2};
    auto const nb = make_pairs(u, Pairing::sorted_neighbors);
    REQUIRE(nb.size() == 2);
    CHECK(nb[0] == IndexPair{1, 2});
    CHECK(nb[1] == IndexPair{2, 0});
    CHECK(make_pairs(u, Pairing::all_pairs).size() == 3);
}

TEST_CASE("TB learned reward on one-edge and two-action examples") {
    auto g1 = make_grid(1, 1);
    FlowModel m1(*g1, testing::tabular_spec(), BackwardMode::uniform);
    auto const t1 = make_path(*g1, {1});
    CHECK(t1.length() == 1);
    CHECK(learned_log_reward_value(m1, t1, Criterion::tb) == doctest::Approx(0.0).epsilon(1e-15));

    auto g2 = make_grid(1, 2);
    FlowModel m2(*g2, testing::tabular_spec(), BackwardMode::uniform);
    m2.params()[m2.log_z_slot()] = std::log(2.0);
    auto const t2 = make_path(*g2, {1});  // terminate at s0: P_F = 1/2, P_B = 1
    CHECK(learned_log_reward_value(m2, t2, Criterion::tb) == doctest::Approx(0.0).epsilon(1e-14));
    ad::Tape tape(m2.params());
    CHECK(tb_log_reward(tape, m2, t2).value() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("TB loss is the squared residual") {
    auto g = make_grid(2, 4);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::trainable);
    testing::randomize(m, 3);
    auto const t = make_path(*g, {0, 1, 1, 2});
    double const log_rhat = learned_log_reward_value(m, t, Criterion::tb);
    ad::Tape tape(m.params());
    CHECK(tb_loss(tape, m, t, log_rhat).value() == doctest::Approx(0.0).epsilon(1e-14));
    ad::Tape tape2(m.params());
    CHECK(tb_loss(tape2, m, t, log_rhat - 0.7).value() == doctest::Approx(0.49).epsilon(1e-12));
}

TEST_CASE("DB on a two-state chain balances") {
    auto g = make_grid(1, 2);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::uniform);
    auto const t = make_path(*g, {1});
    m.params()[m.table_slot(t.states[0], m.flow_column())] = std::log(2.0);
    m.params()[m.table_slot(t.states[1], m.flow_column())] = 0.0;
    ad::Tape tape(m.params());
    CHECK(db_loss(tape, m, t, std::nullopt).value() == doctest::Approx(0.0).epsilon(1e-15));
    ad::Tape tape2(m.params());
    CHECK(db_loss(tape2, m, t, 0.5).value() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("subTB on a three-state chain equals the hand-weighted residuals") {
    auto g = make_grid(1, 2);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::trainable);
    testing::randomize(m, 5);
    auto const t = make_path(*g, {0, 1});
    REQUIRE(t.states.size() == 3);
    double const lambda = 0.7;
    double f[3];
    double step[2];
    for (int i = 0; i < 3; ++i) { f[i] = m.evaluate(t.states[static_cast<std::size_t>(i)]).log_flow; }
    for (std::size_t i = 0; i < 2; ++i) {
        auto const parent = m.evaluate(t.states[i]);
        auto const child = m.evaluate(t.states[i + 1]);
        double const lpf = ad::log_softmax_masked(parent.forward, legal_forward(*g, t.states[i]))[t.actions[i].index];
        auto const b = g->backward_inverse(t.states[i], t.actions[i]);
        double const lpb = ad::log_softmax_masked(child.backward, legal_backward(*g, t.states[i + 1]))[b.index];
        step[i] = lpf - lpb;
    }
    auto sq = [](double x) { return x * x; };
    double const r01 = sq(f[0] + step[0] - f[1]);
    double const r12 = sq(f[1] + step[1] - f[2]);
    double const r02 = sq(f[0] + step[0] + step[1] - f[2]);
    double const expected = (lambda * r01 + lambda * r12 + lambda * lambda * r02) / (2 * lambda + lambda * lambda);
    ad::Tape tape(m.params());
    CHECK(subtb_loss(tape, m, t, lambda, std::nullopt).value() == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("flow matching is zero when in-flow equals out-flow") {
    auto g = make_grid(1, 3);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::uniform);
    // s1 = (1) has one parent s0 via action 0 and two children.
    env::State const s0 = g->initial_state();
    env::State const s1 = g->step(s0, env::ActionId{0});
    m.params()[m.table_slot(s0, 0)] = std::log(3.0);
    m.params()[m.table_slot(s1, 0)] = std::log(1.0);
    m.params()[m.table_slot(s1, 1)] = std::log(2.0);
    ad::Tape tape(m.params());
    CHECK(fm_state_loss(tape, m, s1).value() == doctest::Approx(0.0).epsilon(1e-15));
    m.params()[m.table_slot(s1, 1)] = std::log(5.0);
    ad::Tape tape2(m.params());
    CHECK(fm_state_loss(tape2, m, s1).value() == doctest::Approx(std::pow(std::log(3.0 / 6.0), 2)).epsilon(1e-13));
}

TEST_CASE("KL to uniform: hand value, uniform and single action") {
    ad::ParamStore dummy;
    ad::Tape tape(dummy);
    std::vector<std::size_t> legal{0, 1};
    auto const kl = kl_to_uniform(constants(tape, {std::log(0.9), std::log(0.1)}), legal);
    CHECK(kl.value() == doctest::Approx(0.9 * std::log(1.8) + 0.1 * std::log(0.2)).epsilon(1e-14));
    CHECK(kl_to_uniform(constants(tape, {0.4, 0.4, 0.4}), std::vector<std::size_t>{0, 1, 2}).value() ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(kl_to_uniform(constants(tape, {3.0, -1.0}), std::vector<std::size_t>{1}).value() == 0.0);

    auto g = make_grid(2, 4);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::trainable);
    ad::Tape t2(m.params());
    CHECK(kl_reg(t2, m, make_path(*g, {0, 1, 2})).value() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("preference scalarization") {
    std::vector<double> u{0.2, 0.8};
    CHECK(scalarize_preference(u, std::vector<double>{1.0, 0.0}) == 0.2);
    CHECK(scalarize_preference(u, std::vector<double>{0.5, 0.5}) == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)scalarize_preference(u, std::vector<double>{0.6, 0.5}), ContractViolation);
    LossConfig c;
    c.order_preserving = false;
    c.preference = Preference::fixed;
    c.preference_weights = {0.5, 0.5};
    c.beta = 2.0;
    Trajectory t;
    t.objective = u;
    CHECK(std::exp(log_reward_target(t, c)) == doctest::Approx(0.25));
}

TEST_CASE("configuration errors name the field") {
    LossConfig c;
    c.pairing = Pairing::sorted_neighbors;
    CHECK_THROWS_WITH_AS(validate(c, 2), doctest::Contains("loss.pairing"), ConfigError);
    LossConfig fm;
    fm.criterion = Criterion::fm;
    fm.backward = BackwardMode::trainable;
    CHECK_THROWS_AS(validate(fm, 1), ConfigError);
    LossConfig off;
    off.order_preserving = false;
    CHECK_THROWS_AS(validate(off, 2), ConfigError);
    CHECK_NOTHROW(validate(LossConfig{}, 2));
}

TEST_CASE("composite: TB+OP on mirrored paths with equal objectives is zero") {
    auto g = make_grid(2, 4);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::uniform);
    std::vector<Trajectory> batch{make_path(*g, {0, 2}), make_path(*g, {1, 2})};
    LossConfig c;
    ad::Tape tape(m.params());
    CHECK(composite_loss(tape, m, batch, c).total.value() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("composite: DB+OP with lambda_op = 0 is plain mean DB") {
    auto g = make_grid(2, 4);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::trainable);
    testing::randomize(m, 9);
    std::vector<Trajectory> batch{make_path(*g, {0, 0, 2}), make_path(*g, {1, 2}), make_path(*g, {0, 1, 1, 2})};
    LossConfig c;
    c.criterion = Criterion::db;
    c.lambda_op = 0.0;
    ad::Tape tape(m.params());
    double const composite = composite_loss(tape, m, batch, c).total.value();
    double manual = 0.0;
    for (auto const& t : batch) {
        ad::Tape tt(m.params());
        manual += db_loss(tt, m, t, std::nullopt).value();
    }
    ad::Tape tape2(m.params());
    std::vector<ad::Var> parts;
    for (auto const& t : batch) { parts.push_back(db_loss(tape2, m, t, std::nullopt)); }
    CHECK(composite == (ad::sum(parts) / 3.0).value());
    CHECK(composite == doctest::Approx(manual / 3.0).epsilon(1e-14));
}

TEST_CASE("composite: subTB+OP+KL equals its hand-assembled parts") {
    auto g = make_grid(1, 6);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::trainable_kl);
    testing::randomize(m, 13);
    std::vector<Trajectory> batch{make_path(*g, {0, 0, 1}), make_path(*g, {1}), make_path(*g, {0, 0, 0, 1}),
                                  make_path(*g, {0, 1})};
    LossConfig c;
    c.criterion = Criterion::subtb;
    c.backward = BackwardMode::trainable_kl;
    c.lambda_op = 0.3;
    c.lambda_kl = 0.7;
    ad::Tape tape(m.params());
    auto const br = composite_loss(tape, m, batch, c);

    double mdp = 0.0;
    double kl = 0.0;
    std::vector<double> log_r;
    std::vector<double> u;
    for (auto const& t : batch) {
        ad::Tape tt(m.params());
        mdp += subtb_loss(tt, m, t, c.lambda_subtb, std::nullopt).value();
        ad::Tape tk(m.params());
        kl += kl_reg(tk, m, t).value();
        log_r.push_back(learned_log_reward_value(m, t, Criterion::subtb));
        u.push_back(t.objective[0]);
    }
    auto const pairs = make_pairs(u, Pairing::sorted_neighbors);
    double const op = op_loss_pairwise_value(log_r, u, pairs) / static_cast<double>(pairs.size());
    double const expected = mdp / 4.0 + 0.3 * op + 0.7 * kl / 4.0;
    CHECK(br.total.value() == doctest::Approx(expected).epsilon(1e-13));
    CHECK(br.op == doctest::Approx(op).epsilon(1e-13));
}

TEST_CASE("learned reward: taped and numeric forms agree for every criterion") {
    auto g = make_grid(2, 4);
    for (auto backward : {BackwardMode::uniform, BackwardMode::trainable}) {
        FlowModel m(*g, testing::small_mlp_spec(), backward);
        testing::randomize(m, 21, 0.3);
        auto const t = make_path(*g, {0, 1, 0, 2});
        for (auto c : {Criterion::tb, Criterion::db, Criterion::subtb, Criterion::fm}) {
            ad::Tape tape(m.params());
            CHECK(learned_log_reward(tape, m, t, c).value() ==
                  doctest::Approx(learned_log_reward_value(m, t, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("losses are invariant to a constant shift of the forward logits") {
    auto g = make_grid(2, 4);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::trainable);
    testing::randomize(m, 4);
    std::vector<Trajectory> batch{make_path(*g, {0, 2}), make_path(*g, {1, 1, 2}), make_path(*g, {0, 1, 2})};
    LossConfig tb;
    LossConfig db;
    db.criterion = Criterion::db;
    db.order_preserving = false;
    auto eval = [&](LossConfig const& c) {
        ad::Tape tape(m.params());
        return composite_loss(tape, m, batch, c).total.value();
    };
    double const before_tb = eval(tb);
    double const before_db = eval(db);
    for (auto const& layer : state_layers(*g)) {
        for (auto const& s : layer) {
            for (std::size_t a = 0; a < g->num_forward_actions(); ++a) { m.params()[m.table_slot(s, a)] += 3.25; }
        }
    }
    CHECK(eval(tb) == doctest::Approx(before_tb).epsilon(1e-10));
    CHECK(eval(db) == doctest::Approx(before_db).epsilon(1e-10));
}

TEST_CASE("op loss is nonnegative on random batches") {
    auto g = testing::rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        auto const n = static_cast<std::size_t>(testing::uniform_int(g, 2, 9));
        std::vector<env::ObjectiveVector> u;
        std::vector<double> u1;
        for (std::size_t i = 0; i < n; ++i) {
            u.push_back(testing::uniform_vector(g, 2));
            u1.push_back(std::round(testing::uniform(g, 0, 4)));
        }
        auto const log_r = testing::uniform_vector(g, n, -5, 5);
        CHECK(op_loss_pareto_value(log_r, u) >= -1e-14);
        CHECK(op_loss_pairwise_value(log_r, u1, make_pairs(u1, Pairing::all_pairs)) >= -1e-14);
    }
}

namespace {

// Random complete trajectories on the grid from the model's own policy.
std::vector<Trajectory> rollouts(env::Environment const& env, FlowModel const& m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < n; ++i) { out.push_back(train::sample_trajectory(env, m, {0.5, 1.0}, g)); }
    return out;
}

void expect_gradient_ok(FlowModel& m, ad::LossBuilder const& build, std::uint64_t seed) {
    auto const coords = ad::random_coordinates(m.params().size(), 64, seed);
    auto const r = ad::gradcheck(m.params(), build, coords);
    CHECK(r.fd_norm > 0.0);
    CHECK(r.relative_error < 1e-4);
}

} // namespace

TEST_CASE("gradient checks on every loss") {
    auto g = make_grid(2, 4, 0.1);
    for (auto type : {ModelType::tabular, ModelType::mlp}) {
        CAPTURE(to_string(type));
        auto spec = type == ModelType::tabular ? testing::tabular_spec() : testing::small_mlp_spec(3);
        FlowModel m(*g, spec, BackwardMode::trainable_kl);
        testing::randomize(m, 31, 0.4);
        auto const batch = rollouts(*g, m, 6, 77);
        auto const& t = batch.front();
        double const target = std::log(t.objective[0]);

        SUBCASE("tb") { expect_gradient_ok(m, [&](ad::Tape& tp) { return tb_loss(tp, m, t, target); }, 1); }
        SUBCASE("db") { expect_gradient_ok(m, [&](ad::Tape& tp) { return db_loss(tp, m, t, std::nullopt); }, 2); }
        SUBCASE("subtb") {
            expect_gradient_ok(m, [&](ad::Tape& tp) { return subtb_loss(tp, m, t, 0.9, target); }, 3);
        }
        SUBCASE("kl") { expect_gradient_ok(m, [&](ad::Tape& tp) { return kl_reg(tp, m, t); }, 4); }
        SUBCASE("op pareto") {
            std::vector<env::ObjectiveVector> u;
            for (auto const& x : batch) { u.push_back({x.objective[0], 1.0 - x.objective[0]}); }
            u[1] = {2.0, 2.0};
            expect_gradient_ok(m, [&](ad::Tape& tp) {
                std::vector<ad::Var> lr;
                for (auto const& x : batch) { lr.push_back(tb_log_reward(tp, m, x)); }
                return op_loss_pareto(lr, u);
            }, 5);
        }
        SUBCASE("op pairwise") {
            std::vector<double> u{0.1, 0.4, 0.4, 0.2, 0.9, 0.3};
            auto const pairs = make_pairs(u, Pairing::all_pairs);
            expect_gradient_ok(m, [&](ad::Tape& tp) {
                std::vector<ad::Var> lr;
                for (auto const& x : batch) { lr.push_back(learned_log_reward(tp, m, x, Criterion::db)); }
                return op_loss_pairwise(lr, u, pairs);
            }, 6);
        }
        SUBCASE("composite") {
            for (auto crit : {Criterion::tb, Criterion::db, Criterion::subtb}) {
                for (bool op : {true, false}) {
                    LossConfig c;
                    c.criterion = crit;
                    c.order_preserving = op;
                    c.backward = BackwardMode::trainable_kl;
                    c.lambda_kl = 0.5;
                    expect_gradient_ok(m, [&](ad::Tape& tp) { return composite_loss(tp, m, batch, c).total; }, 7);
                }
            }
        }
    }
    SUBCASE("fm") {
        FlowModel m(*g, testing::small_mlp_spec(5), BackwardMode::uniform);
        testing::randomize(m, 41, 0.4);
        auto const batch = rollouts(*g, m, 6, 79);
        LossConfig c;
        c.criterion = Criterion::fm;
        expect_gradient_ok(m, [&](ad::Tape& tp) { return fm_loss(tp, m, batch[0], -0.5); }, 8);
        expect_gradient_ok(m, [&](ad::Tape& tp) { return composite_loss(tp, m, batch, c).total; }, 9);
    }
}

TEST_CASE("exact terminal distribution sums to one and matches uniform pushforward") {
    auto g = make_grid(2, 2);
    FlowModel m(*g, testing::tabular_spec(), BackwardMode::uniform);
    auto const p = terminal_distribution(m);
    REQUIRE(p.size() == 4);
    // Uniform policy: terminate at s0 w.p. 1/3; (1,0) and (0,1) w.p. 1/3 * 1/2; (1,1) gets the rest.
    CHECK(p[0] == doctest::Approx(1.0 / 3.0));
    CHECK(p[1] == doctest::Approx(1.0 / 6.0));
    CHECK(p[2] == doctest::Approx(1.0 / 6.0));
    CHECK(p[3] == doctest::Approx(1.0 / 3.0));
    auto const eps = terminal_distribution(m, 1.0, 1.0);
    CHECK(eps[3] == doctest::Approx(1.0 / 3.0));
    CHECK(mean_backward_kl(m) == 0.0);
}
