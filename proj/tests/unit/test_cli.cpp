#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "opgfn/cli/commands.hpp"
#include "opgfn/cli/run_config.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/metrics/exploration.hpp"
#include "opgfn/metrics/reference.hpp"
#include "opgfn/util/format.hpp"
#include "test_util.hpp"

using namespace opgfn;
using namespace opgfn::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const& name) {
    auto p = fs::temp_directory_path() / ("opgfn_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(fs::path const& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig small_grid(fs::path const& out) {
    return parse_run_config("env.kind = hypergrid\nenv.dim = 2\nenv.side = 4\nmodel.type = tabular\n"
                            "train.n_init = 16\ntrain.n_rounds = 5\ntrain.n_new = 16\ntrain.batch_size = 16\n"
                            "train.lr = 0.05\nrun.output = " + out.string() + "\n");
}

RunConfig moo_grid(fs::path const& out) {
    return parse_run_config("env.kind = hypergrid\nenv.dim = 2\nenv.side = 8\nenv.objectives = branin,currin\n"
                            "model.type = tabular\ntrain.n_init = 32\ntrain.n_rounds = 3\ntrain.n_new = 32\n"
                            "train.batch_size = 32\neval.candidates = 16\neval.rounds = 2\nrun.output = " + out.string() + "\n");
}

std::vector<std::vector<double>> read_csv_points(fs::path const& p) {
    std::vector<std::vector<double>> out;
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);  // column names
    while (std::getline(in, line)) {
        std::vector<double> row;
        for (auto const& f : util::split(line, ',')) { row.push_back(util::parse_double(f)); }
        out.push_back(row);
    }
    return out;
}

std::string header_of(fs::path const& p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST_CASE("run config defaults and key errors") {
    auto const c = parse_run_config("");
    CHECK(c.env.kind == env::EnvKind::hypergrid);
    CHECK(c.loss.criterion == gfn::Criterion::tb);
    CHECK(c.train.n_rounds == 100);
    CHECK(c.eval.indicators.size() == 8);
    try {
        (void)parse_run_config("train.n_round = 5\n");
        FAIL("expected ConfigError");
    } catch (ConfigError const& e) { CHECK(std::string(e.what()).find("train.n_round") != std::string::npos); }
    try {
        (void)parse_run_config("loss.beta = fast\n");
        FAIL("expected ConfigError");
    } catch (ConfigError const& e) { CHECK(std::string(e.what()).find("loss.beta") != std::string::npos); }
    CHECK_THROWS_AS((void)parse_run_config("env.dim = 2\nenv.dim = 3\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config("train.n_new = -1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_run_config("no equals sign\n"), ConfigError);
    auto const commented = parse_run_config("# comment\n\n  env.side = 5  \n");
    CHECK(commented.env.side == 5);
}

TEST_CASE("config echo round-trips on generated configs") {
    auto g = testing::rng(21);
    auto const keys = config_keys();
    for (int trial = 0; trial < 100; ++trial) {
        RunConfig c;
        c.seed = g();
        c.env.dim = testing::uniform_int(g, 1, 5);
        c.env.r0 = testing::uniform(g, 0.0, 1.0);
        c.env.objectives = testing::uniform_int(g, 0, 1) == 0 ? std::vector<std::string>{} : std::vector<std::string>{"branin", "currin"};
        c.model.hidden = {static_cast<std::size_t>(testing::uniform_int(g, 1, 64)), 7};
        c.model.init_log_z = testing::uniform(g, -3.0, 3.0);
        c.loss.lambda_op = testing::uniform(g, 0.0, 2.0);
        c.loss.epsilon = testing::uniform(g, 0.0, 0.5);
        c.loss.criterion = static_cast<gfn::Criterion>(testing::uniform_int(g, 0, 3));
        c.loss.pairing = static_cast<gfn::Pairing>(testing::uniform_int(g, 0, 3));
        c.loss.preference_weights = testing::uniform_vector(g, static_cast<std::size_t>(testing::uniform_int(g, 0, 3)));
        c.train.lr = testing::uniform(g, 1e-5, 1.0);
        c.train.prt = testing::uniform_int(g, 0, 1) == 1;
        c.train.n_off = static_cast<std::size_t>(testing::uniform_int(g, 0, 500));
        c.eval.hv_reference = testing::uniform_vector(g, static_cast<std::size_t>(testing::uniform_int(g, 0, 2)), -1.0, 0.0);
        c.output = "dir" + std::to_string(trial);
        auto const text = echo(c);
        auto const back = parse_run_config(text);
        CHECK(back == c);
        CHECK(echo(back) == text);
        CHECK(util::split(text, '\n').size() == keys.size() + 1);
    }
    RunConfig a;
    RunConfig b;
    b.loss.beta = 2.0;
    CHECK_FALSE(a == b);
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("train writes one log row per round, deterministically") {
    auto const dir = scratch("train");
    auto c = small_grid(dir);
    std::ostringstream sink;
    REQUIRE(cmd_train(c, sink) == exit_ok);
    auto const log = slurp(dir / "log.csv");
    auto const lines = util::split(log, '\n');
    CHECK(lines[0] == output_header(c));
    CHECK(lines[1] == train::RunLog::csv_header);
    CHECK(lines.size() == 2 + c.train.n_rounds + 1);
    CHECK(header_of(dir / "config.txt") == output_header(c));
    auto const echoed = slurp(dir / "config.txt");
    CHECK(parse_run_config(echoed.substr(echoed.find('\n') + 1)) == c);
    auto const ck = ad::load_checkpoint(dir / "checkpoint.txt");
    CHECK(ck.require("round") == std::to_string(c.train.n_rounds));
    CHECK(ck.require("seed") == "0");

    REQUIRE(cmd_train(c, sink) == exit_ok);
    CHECK(slurp(dir / "log.csv") == log);
    c.seed = 9;
    REQUIRE(cmd_train(c, sink) == exit_ok);
    CHECK(slurp(dir / "log.csv") != log);
}

TEST_CASE("train rejects order preservation with pairwise pairing on several objectives before any work") {
    auto const dir = scratch("badpairing");
    auto c = moo_grid(dir);
    c.loss.pairing = gfn::Pairing::sorted_neighbors;
    std::ostringstream sink;
    try {
        (void)cmd_train(c, sink);
        FAIL("expected ConfigError");
    } catch (ConfigError const& e) { CHECK(std::string(e.what()).find("loss.pairing") != std::string::npos); }
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("checkpoint text round-trips and rejects a different environment") {
    auto const dir = scratch("ckpt");
    auto c = small_grid(dir);
    std::ostringstream sink;
    REQUIRE(cmd_train(c, sink) == exit_ok);
    auto const ck = ad::load_checkpoint(dir / "checkpoint.txt");
    CHECK(ad::to_text(ad::parse_checkpoint(ad::to_text(ck))) == ad::to_text(ck));
    auto const env = validate(c);
    auto const model = restore_model(c, *env, ck);
    CHECK(std::equal(model.params().values().begin(), model.params().values().end(), ck.block("params")->begin()));
    auto other = c;
    other.env.side = 5;
    auto const other_env = validate(other);
    try {
        (void)restore_model(other, *other_env, ck);
        FAIL("expected ConfigError");
    } catch (ConfigError const& e) {
        std::string const msg = e.what();
        CHECK(msg.find(ck.require("env_hash")) != std::string::npos);
        CHECK(msg.find(env_hash(*other_env)) != std::string::npos);
    }
    CHECK_THROWS_AS((void)ad::parse_checkpoint("# opgfn checkpoint 1\nparams 3\n1\n2\n"), ConfigError);
    CHECK_THROWS_AS((void)ad::parse_checkpoint("garbage\n"), ConfigError);
}

TEST_CASE("eval-moo report schema and recomputation from the raw CSV") {
    auto const dir = scratch("evalmoo");
    auto c = moo_grid(dir);
    std::ostringstream sink;
    REQUIRE(cmd_train(c, sink) == exit_ok);
    REQUIRE(cmd_eval_moo(c, dir / "checkpoint.txt", sink) == exit_ok);
    auto const report = slurp(dir / "indicators.txt");
    CHECK(header_of(dir / "indicators.txt") == output_header(c));
    CHECK(header_of(dir / "candidates.csv") == output_header(c));
    for (auto key : {"d_h = ", "igd_plus = ", "pc_ent = ", "hv = ", "r2 = ", "n_candidates = 32"}) {
        CHECK(report.find(key) != std::string::npos);
    }
    auto const points = read_csv_points(dir / "candidates.csv");
    REQUIRE(points.size() == 32);
    auto const env = validate(c);
    auto const recomputed = format_report(indicator_report(points, *env, c.eval), c.eval);
    CHECK(report.find(recomputed) != std::string::npos);

    auto const front = metrics::reference_front(*env, c.eval.front_resolution);
    auto const exact = indicator_report(front.points, *env, c.eval);
    CHECK(exact.igd_plus == 0.0);
    CHECK(exact.d_h == 0.0);

    c.eval.indicators = {"d_h"};
    auto const only = format_report(exact, c.eval);
    CHECK(only.find("igd_plus") == std::string::npos);
    CHECK(only.find("d_h = 0") != std::string::npos);
}

TEST_CASE("diagnose on an untrained model and on a synthetic visit log") {
    auto const dir = scratch("diagnose");
    auto c = small_grid(dir);
    c.env.side = 8;
    c.loss.criterion = gfn::Criterion::db;
    c.train.recent_window = 4;
    std::ostringstream sink;
    REQUIRE(cmd_diagnose(c, std::nullopt, sink) == exit_ok);
    auto const text = slurp(dir / "diagnostics.txt");
    CHECK(text.find("ratio_visited = 0\n") != std::string::npos);
    auto const land = util::split(slurp(dir / "landscape.csv"), '\n');
    // Header, column names, one row per distinct u (r0, r0 + 0.5, r0 + 2.5) and the trailing newline.
    REQUIRE(land.size() == 6);
    std::set<std::string> means;
    for (std::size_t i = 2; i < 5; ++i) { means.insert(util::split(land[i], ',')[1]); }
    CHECK(means.size() == 1);

    auto const env = validate(c);
    auto const maximal = metrics::maximal_terminals(*env);
    REQUIRE(maximal.size() >= 2);
    std::size_t other = 0;
    while (std::find(maximal.begin(), maximal.end(), other) != maximal.end()) { ++other; }
    gfn::FlowModel const model(*env, model_spec(c, *env), c.loss.backward);
    auto ck = make_checkpoint(c, *env, model, nullptr, nullptr, 0);
    std::vector<std::size_t> const visits{other, maximal[0], other, other, maximal[0], maximal[1]};
    std::vector<double> block(visits.begin(), visits.end());
    ck.set_block("visits", block);
    ad::save_checkpoint(ck, dir / "synthetic.txt");
    REQUIRE(cmd_diagnose(c, dir / "synthetic.txt", sink) == exit_ok);
    auto const d = slurp(dir / "diagnostics.txt");
    auto const n = static_cast<double>(*env->terminal_count());
    CHECK(d.find("ratio_visited = " + util::format_double(3.0 / n) + "\n") != std::string::npos);
    CHECK(d.find("ratio_max_found = " + util::format_double(2.0 / static_cast<double>(maximal.size())) + "\n") != std::string::npos);
    // Last four visits: other, other, max, max.
    CHECK(d.find("ratio_max_recent = 0.5\n") != std::string::npos);
    CHECK(d.find("distinct_max_recent = 2\n") != std::string::npos);

    auto seq = parse_run_config("env.kind = seq-prepend-append\nenv.alphabet_size = 20\nenv.max_length = 30\n"
                                "env.objectives = ngram:AC\nrun.output = " + dir.string() + "\n");
    CHECK_THROWS_AS((void)cmd_diagnose(seq, std::nullopt, sink), CapabilityError);
}

TEST_CASE("oracle command outcomes") {
    std::ostringstream out;
    OracleParams p;
    p.which = "prop1";
    CHECK(cmd_oracle(p, out) == exit_ok);
    CHECK(out.str().find("pass | prop1 rewards") != std::string::npos);
    std::ostringstream out3;
    p.which = "prop3";
    p.alpha = 3.0;
    CHECK(cmd_oracle(p, out3) == exit_ok);
    CHECK(out3.str().find("condition unmet | prop3 shared") != std::string::npos);
    std::ostringstream all;
    p.which = "all";
    p.alpha.reset();
    auto const dir = scratch("oracle");
    p.out = dir;
    CHECK(cmd_oracle(p, all) == exit_ok);
    CHECK(util::split(all.str(), '\n').size() == 1 + 9 + 1);
    CHECK(slurp(dir / "oracle.txt") == all.str());
    p.which = "prop4";
    CHECK_THROWS_AS((void)cmd_oracle(p, all), ConfigError);
}

TEST_CASE("compare tabulates one column per config") {
    auto const dir = scratch("compare");
    std::vector<RunConfig> configs;
    for (double beta : {4.0, 8.0, 16.0, 32.0}) {
        auto c = small_grid(dir / "runs");
        c.loss.order_preserving = false;
        c.loss.beta = beta;
        configs.push_back(c);
    }
    std::ostringstream sink;
    REQUIRE(cmd_compare(configs, {0, 1}, "r3", dir, sink) == exit_ok);
    auto const lines = util::split(slurp(dir / "compare.csv"), '\n');
    CHECK(lines[1] == "seed,loss.beta=4,loss.beta=8,loss.beta=16,loss.beta=32");
    CHECK(lines.size() == 2 + 2 + 2 + 1);
    CHECK(util::split(lines[2], ',').size() == 5);

    std::vector<RunConfig> same{configs[0], configs[0]};
    REQUIRE(cmd_compare(same, {0, 1, 2}, "loss", dir, sink) == exit_ok);
    for (auto const& line : util::split(slurp(dir / "compare.csv"), '\n')) {
        auto const f = util::split(line, ',');
        if (f.size() == 3 && f[0] != "seed" && f[0].front() != '#') { CHECK(f[1] == f[2]); }
    }
    auto other = configs[1];
    other.env.side = 5;
    CHECK_THROWS_AS((void)cmd_compare({configs[0], other}, {0}, "r3", dir, sink), ConfigError);
    CHECK_THROWS_AS((void)cmd_compare(configs, {0}, "hv", dir, sink), ConfigError);
}

TEST_CASE("sample keeps the top k of K by learned reward") {
    auto const dir = scratch("sample");
    auto c = small_grid(dir);
    std::ostringstream sink;
    REQUIRE(cmd_train(c, sink) == exit_ok);
    c.eval.candidates = 4;
    c.eval.boost_ratio = 8.0;
    REQUIRE(cmd_sample(c, dir / "checkpoint.txt", sink) == exit_ok);
    auto const lines = util::split(slurp(dir / "samples.csv"), '\n');
    CHECK(lines[0] == output_header(c));
    CHECK(lines[1] == "state,log_reward_hat,hypergrid");
    REQUIRE(lines.size() == 2 + 4 + 1);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i < 6; ++i) {
        double const lr = util::parse_double(util::split(lines[i], ',')[1]);
        CHECK(lr <= prev);
        prev = lr;
    }
}

TEST_CASE("shipped configs parse and validate") {
    std::size_t seen = 0;
    for (auto const& entry : fs::directory_iterator(OPGFN_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") { continue; }
        CAPTURE(entry.path().string());
        auto const c = load_run_config(entry.path());
        CHECK(validate(c) != nullptr);
        ++seen;
    }
    CHECK(seen >= 2);
}
