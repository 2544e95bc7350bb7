#include "opgfn/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "opgfn/errors.hpp"
#include "opgfn/gfn/losses.hpp"
#include "opgfn/metrics/exploration.hpp"
#include "opgfn/metrics/reference.hpp"
#include "opgfn/theory/chain.hpp"
#include "opgfn/theory/flow.hpp"
#include "opgfn/train/sampler.hpp"
#include "opgfn/util/format.hpp"
#include "opgfn/util/hash.hpp"

namespace opgfn::cli {

namespace {

// Stream tags for command-level sampling, disjoint from the trainer's.
constexpr std::uint64_t eval_tag = std::uint64_t{0x45} << 40;
constexpr std::uint64_t boost_tag = std::uint64_t{0x42} << 40;

std::filesystem::path prepare_dir(std::string const& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

void write_file(std::filesystem::path const& path, std::string const& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) { throw ConfigError("cannot write " + path.string()); }
    f << text;
    if (!f) { throw ConfigError("write failed for " + path.string()); }
}

std::string state_text(env::State const& s) {
    std::string out;
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        if (i > 0) { out += ' '; }
        out += std::to_string(s.cells[i]);
    }
    return out;
}

std::vector<std::size_t> visits_from(ad::Checkpoint const* ck) {
    std::vector<std::size_t> out;
    if (ck == nullptr) { return out; }
    if (auto const* v = ck->block("visits")) {
        for (double x : *v) {
            if (!(x >= 0.0) || x != std::floor(x)) { throw ConfigError("checkpoint: visits block holds a non-index"); }
            out.push_back(static_cast<std::size_t>(x));
        }
    }
    return out;
}

std::string csv_field(std::string const& s) {
    if (s.find_first_of(",\"") == std::string::npos) { return s; }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') { out += '"'; }
        out += ch;
    }
    return out + "\"";
}

} // namespace

Run train_run(RunConfig const& c, std::function<void(Run&, std::size_t)> const& on_checkpoint) {
    Run run;
    run.config = c;
    resolve(run.config);
    run.env = validate(run.config);
    run.model = std::make_unique<gfn::FlowModel>(*run.env, model_spec(run.config, *run.env), run.config.loss.backward);
    run.trainer = std::make_unique<train::Trainer>(*run.env, *run.model, run.config.train, run.config.loss);
    std::function<void(std::size_t)> hook;
    if (on_checkpoint) {
        hook = [&](std::size_t round) { on_checkpoint(run, round); };
    }
    run.result = run.trainer->run(hook);
    return run;
}

ad::Checkpoint make_checkpoint(RunConfig const& c, env::Environment const& env, gfn::FlowModel const& model,
                               ad::Adam const* adam, metrics::VisitTracker const* tracker, std::size_t round) {
    ad::Checkpoint ck;
    ck.set("env_hash", env_hash(env));
    ck.set("env", env.describe());
    ck.set("model", model.describe());
    ck.set("seed", std::to_string(c.seed));
    ck.set("config_hash", config_hash(c));
    ck.set("round", std::to_string(round));
    ck.set("optimizer_step", std::to_string(adam != nullptr ? adam->steps() : 0));
    auto const values = model.params().values();
    ck.set_block("params", std::vector<double>(values.begin(), values.end()));
    if (adam != nullptr && adam->steps() > 0) {
        ck.set_block("adam_m", adam->first_moment());
        ck.set_block("adam_v", adam->second_moment());
    }
    if (tracker != nullptr) {
        std::vector<double> visits;
        for (auto v : tracker->window()) { visits.push_back(static_cast<double>(v)); }
        ck.set_block("visits", std::move(visits));
    }
    return ck;
}

gfn::FlowModel restore_model(RunConfig const& c, env::Environment const& env, ad::Checkpoint const& ck) {
    auto const& stored = ck.require("env_hash");
    auto const expected = env_hash(env);
    if (stored != expected) {
        throw ConfigError("checkpoint env hash " + stored + " does not match the configured environment (env hash " +
                          expected + ")");
    }
    gfn::FlowModel model(env, model_spec(c, env), c.loss.backward);
    if (auto m = ck.get("model"); m && *m != model.describe()) {
        throw ConfigError("checkpoint model '" + *m + "' does not match the configured model '" + model.describe() + "'");
    }
    auto const* params = ck.block("params");
    if (params == nullptr) { throw ConfigError("checkpoint: missing params block"); }
    if (params->size() != model.params().size()) {
        throw ConfigError("checkpoint holds " + std::to_string(params->size()) + " parameters, the model needs " +
                          std::to_string(model.params().size()));
    }
    std::copy(params->begin(), params->end(), model.params().values().begin());
    return model;
}

std::vector<gfn::Trajectory> sample_candidates(RunConfig const& c, env::Environment const& env,
                                               gfn::FlowModel const& model, std::size_t round, std::size_t count) {
    std::vector<gfn::Trajectory> out;
    out.reserve(count);
    train::SamplingPolicy const policy{};
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(util::derive_seed(c.seed, round, eval_tag | i));
        std::vector<double> pref;
        if (c.loss.preference == gfn::Preference::dirichlet) {
            pref = train::draw_dirichlet(env.objective_dim(), c.loss.dirichlet_alpha, rng);
        }
        out.push_back(train::sample_trajectory(env, model, policy, rng, pref));
    }
    return out;
}

metrics::IndicatorReport indicator_report(std::vector<env::ObjectiveVector> const& candidates,
                                          env::Environment const& env, EvalConfig const& eval) {
    auto const front = metrics::reference_front(env, eval.front_resolution);
    metrics::IndicatorOptions opts;
    opts.hv_ref = eval.hv_reference;
    opts.r2_divisions = eval.r2_divisions;
    return metrics::evaluate_indicators(candidates, front.points, opts);
}

std::string format_report(metrics::IndicatorReport const& r, EvalConfig const& eval) {
    std::string out;
    for (auto const& [key, value] : r.items()) {
        bool const count = key.rfind("n_", 0) == 0;
        bool const selected = std::find(eval.indicators.begin(), eval.indicators.end(), key) != eval.indicators.end();
        if (count || selected) { out += key + " = " + util::format_double(value) + '\n'; }
    }
    return out;
}

int cmd_train(RunConfig const& config, std::ostream& out) {
    RunConfig c = config;
    resolve(c);
    (void)validate(c);
    auto const dir = prepare_dir(c.output);
    write_file(dir / "config.txt", output_header(c) + '\n' + echo(c));
    auto run = train_run(c, [&](Run& r, std::size_t round) {
        auto const ck = make_checkpoint(r.config, *r.env, *r.model, &r.trainer->optimizer(), r.trainer->tracker(), round);
        ad::save_checkpoint(ck, dir / ("checkpoint_round_" + std::to_string(round) + ".txt"));
    });
    write_file(dir / "log.csv", output_header(c) + '\n' + run.result.log.to_csv());
    std::size_t const rounds = run.result.log.rows.empty() ? 0 : run.result.log.rows.back().round;
    auto ck = make_checkpoint(c, *run.env, *run.model, &run.trainer->optimizer(), run.trainer->tracker(), rounds);
    if (run.result.aborted) { ck.set("diagnostic", run.result.diagnostic); }
    ad::save_checkpoint(ck, dir / "checkpoint.txt");
    out << "rounds: " << run.result.log.rows.size() << "\nupdates: " << run.result.updates
        << "\nlast loss: " << util::format_double(run.result.last_loss) << "\noutput: " << dir.string() << '\n';
    if (run.result.aborted) {
        out << "aborted: " << run.result.diagnostic << '\n';
        return exit_aborted;
    }
    return exit_ok;
}

int cmd_eval_moo(RunConfig const& config, std::filesystem::path const& checkpoint, std::ostream& out) {
    RunConfig c = config;
    resolve(c);
    auto env = validate(c);
    auto const ck = ad::load_checkpoint(checkpoint);
    auto const model = restore_model(c, *env, ck);
    std::vector<env::ObjectiveVector> objectives;
    for (std::size_t round = 0; round < c.eval.rounds; ++round) {
        for (auto const& t : sample_candidates(c, *env, model, round, c.eval.candidates)) { objectives.push_back(t.objective); }
    }
    auto const report = indicator_report(objectives, *env, c.eval);
    auto const front = metrics::reference_front(*env, c.eval.front_resolution);
    auto const dir = prepare_dir(c.output);
    std::string text = output_header(c) + '\n';
    text += "env_hash = " + env_hash(*env) + '\n';
    text += "reference = " + metrics::to_string(front.provenance) + '\n';
    text += format_report(report, c.eval);
    write_file(dir / "indicators.txt", text);
    std::string csv = output_header(c) + '\n' + util::join(env->objective_names(), ",") + '\n';
    for (auto const& u : objectives) { csv += util::join_doubles(u, ",") + '\n'; }
    write_file(dir / "candidates.csv", csv);
    out << text;
    return exit_ok;
}

int cmd_diagnose(RunConfig const& config, std::optional<std::filesystem::path> const& checkpoint, std::ostream& out) {
    RunConfig c = config;
    resolve(c);
    auto env = validate(c);
    if (!env->terminal_count()) {
        throw CapabilityError("diagnose needs an enumerable environment; " + env->describe() + " is not");
    }
    std::optional<ad::Checkpoint> ck;
    if (checkpoint) { ck = ad::load_checkpoint(*checkpoint); }
    auto const model = ck ? restore_model(c, *env, *ck) : gfn::FlowModel(*env, model_spec(c, *env), c.loss.backward);
    auto const visits = visits_from(ck ? &*ck : nullptr);
    auto const n = static_cast<std::size_t>(*env->terminal_count());
    std::vector<bool> is_max(n, false);
    for (auto i : metrics::maximal_terminals(*env)) { is_max[i] = true; }
    auto const ratios = metrics::exploration_ratios(visits, is_max, n, c.train.recent_window);
    double l1 = std::nan("");
    if (env->objective_dim() == 1 && !visits.empty()) {
        l1 = metrics::l1_to_target(visits, metrics::target_distribution(*env, c.loss.beta));
    }
    std::string text = output_header(c) + '\n';
    text += "visits = " + std::to_string(visits.size()) + '\n';
    text += "ratio_visited = " + util::format_double(ratios.r1) + '\n';
    text += "ratio_max_found = " + util::format_double(ratios.r2) + '\n';
    text += "ratio_max_recent = " + util::format_double(ratios.r3) + '\n';
    text += "distinct_max_recent = " + std::to_string(ratios.distinct_max_recent) + '\n';
    text += "l1_error = " + util::format_double(l1) + '\n';
    auto const dir = prepare_dir(c.output);
    write_file(dir / "diagnostics.txt", text);
    out << text;
    if (env->objective_dim() == 1) {
        std::string csv = output_header(c) + "\nu,mean_log_reward,count\n";
        for (auto const& row : metrics::reward_landscape(model, c.loss.criterion)) {
            csv += util::format_double(row.u) + ',' + util::format_double(row.mean_log_reward) + ',' +
                   std::to_string(row.count) + '\n';
        }
        write_file(dir / "landscape.csv", csv);
        out << "landscape: " << (dir / "landscape.csv").string() << '\n';
    }
    return exit_ok;
}

int cmd_sample(RunConfig const& config, std::filesystem::path const& checkpoint, std::ostream& out) {
    RunConfig c = config;
    resolve(c);
    auto env = validate(c);
    auto const model = restore_model(c, *env, ad::load_checkpoint(checkpoint));
    std::size_t const k = c.eval.candidates;
    auto const big_k = static_cast<std::size_t>(std::llround(static_cast<double>(k) * c.eval.boost_ratio));
    std::mt19937_64 rng(util::derive_seed(c.seed, 0, boost_tag));
    std::vector<double> pref;
    if (c.loss.preference == gfn::Preference::dirichlet) {
        pref = train::draw_dirichlet(env->objective_dim(), c.loss.dirichlet_alpha, rng);
    }
    auto picked = train::boost_sample(*env, model, c.loss.criterion, train::SamplingPolicy{}, std::max(big_k, k), k, rng, pref);
    std::string csv = output_header(c) + "\nstate,log_reward_hat," + util::join(env->objective_names(), ",") + '\n';
    for (auto& t : picked) {
        double const lr = gfn::learned_log_reward_value(model, t, c.loss.criterion);
        t.objective = env->objective(t.terminal());
        csv += state_text(t.terminal()) + ',' + util::format_double(lr) + ',' + util::join_doubles(t.objective, ",") + '\n';
    }
    auto const dir = prepare_dir(c.output);
    write_file(dir / "samples.csv", csv);
    out << "sampled " << std::max(big_k, k) << ", kept " << picked.size() << ": " << (dir / "samples.csv").string() << '\n';
    return exit_ok;
}

namespace {

struct OracleRow {
    std::string check;
    std::string status;  // pass, fail, info or "condition unmet"
    std::string detail;
};

void oracle_prop1(OracleParams const& p, std::vector<OracleRow>& rows) {
    auto const s = theory::prop1_closed_form(p.n, p.gamma);
    std::vector<theory::Link> const links(p.n, theory::Link::strict);
    auto const res = theory::minimize_chain(links, p.gamma);
    double dev = 0.0;
    for (std::size_t i = 0; i <= p.n; ++i) { dev = std::max(dev, std::abs(res.log_r[i] - std::log(s.rewards[i]))); }
    rows.push_back({"prop1 rewards gamma^(i/n-1)", dev < 1e-3 && res.converged ? "pass" : "fail",
                    "max |log deviation| " + util::format_double(dev)});
    double const gap = std::abs(res.loss - s.loss);
    rows.push_back({"prop1 minimum loss n*log(1+gamma^(-1/n))", gap < 1e-10 ? "pass" : "fail",
                    "closed form " + util::format_double(s.loss) + ", minimizer " + util::format_double(res.loss)});
    double const stated = theory::prop1_stated_loss(p.n, p.gamma);
    rows.push_back({"prop1 n*log(1+1/gamma)", "info",
                    util::format_double(stated) + (std::abs(stated - s.loss) < 1e-10 ? " (equal)" : " (differs from the minimum)")});
}

void oracle_prop2(OracleParams const& p, std::vector<OracleRow>& rows) {
    std::mt19937_64 rng(p.seed);
    std::size_t solved = 0;
    std::size_t skipped = 0;
    double ratio_dev = 0.0;
    double beta_dev = 0.0;
    double solution_dev = 0.0;
    bool converged = true;
    for (std::size_t trial = 0; trial < p.chains; ++trial) {
        auto const n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        std::vector<double> u{0.0};
        for (std::size_t i = 0; i < n; ++i) { u.push_back(u.back() + static_cast<double>(std::uniform_int_distribution<int>(0, 1)(rng))); }
        theory::RankedChain const chain{u, p.chain_gamma, true};
        if (theory::gamma0(chain.m(), n) >= chain.gamma) {
            ++skipped;
            continue;
        }
        ++solved;
        std::vector<theory::Link> full{theory::Link::strict};
        auto const links = chain.links();
        full.insert(full.end(), links.begin(), links.end());
        full.push_back(theory::Link::strict);
        auto const res = theory::minimize_chain(full, chain.gamma);
        converged = converged && res.converged;
        std::vector<double> up;
        std::vector<double> tie;
        for (std::size_t j = 0; j < full.size(); ++j) {
            (full[j] == theory::Link::strict ? up : tie).push_back(res.log_r[j + 1] - res.log_r[j]);
        }
        auto spread = [](std::vector<double> const& v) {
            if (v.empty()) { return 0.0; }
            auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return *hi - *lo;
        };
        ratio_dev = std::max({ratio_dev, spread(up), spread(tie)});
        double const alpha = std::exp(up.front());
        if (!tie.empty()) { beta_dev = std::max(beta_dev, std::abs(std::exp(tie.front()) - theory::beta_of(alpha))); }
        auto const s = theory::prop2_solve(chain);
        for (std::size_t i = 0; i <= n; ++i) {
            solution_dev = std::max(solution_dev, std::abs(res.log_r[i + 1] - std::log(s.rewards[i])));
        }
    }
    std::string const counts = std::to_string(solved) + " chains solved, " + std::to_string(skipped) + " with gamma <= gamma0";
    rows.push_back({"prop2 constant log-ratios on I1 and I2", converged && ratio_dev < 1e-3 ? "pass" : "fail",
                    counts + "; max spread " + util::format_double(ratio_dev)});
    rows.push_back({"prop2 beta = (alpha-1)/(alpha+3)", beta_dev < 1e-6 ? "pass" : "fail",
                    "max deviation " + util::format_double(beta_dev)});
    rows.push_back({"prop2 minimizer = piecewise solution", solution_dev < 1e-6 ? "pass" : "fail",
                    "max |log deviation| " + util::format_double(solution_dev)});
    std::vector<double> const u{0, 1, 1, 2, 3, 3};
    std::vector<double> gammas;
    double const g0 = theory::gamma0(theory::RankedChain{u, 1.0, true}.m(), u.size() - 1);
    for (double g = 1e2; g <= 1e12; g *= 10.0) {
        if (g > g0) { gammas.push_back(g); }
    }
    auto const trend = theory::sparsification_trend(u, gammas);
    rows.push_back({"prop2 loss falls and alpha, beta rise with gamma", trend.holds() ? "pass" : "fail",
                    std::to_string(trend.rows.size()) + " gamma values, beta at the largest " +
                        util::format_double(trend.rows.empty() ? 0.0 : trend.rows.back().beta)});
}

void oracle_prop3(OracleParams const& p, std::vector<OracleRow>& rows) {
    double worst = 0.0;
    for (std::size_t k = 1; k <= p.length; ++k) {
        double const bf = theory::expected_flow_fraction_bruteforce(p.length, k);
        worst = std::max(worst, std::abs(bf - 1.0 / static_cast<double>(p.length - k + 1)));
    }
    rows.push_back({"prop3 E F(s) = R(x)/(l-k+1) by enumeration", worst < 1e-12 ? "pass" : "fail",
                    "l=" + std::to_string(p.length) + ", max deviation " + util::format_double(worst)});
    auto const r = p.alpha ? theory::prop3_from_alpha(p.length, p.substring, 3, *p.alpha)
                           : theory::prop3_expected_flow(p.length, p.substring, 3, p.chain_gamma);
    std::string const detail = "alpha " + util::format_double(r.alpha) + ", E F(s*) " +
                               util::format_double(r.flow_shared) + ", competitor bound " +
                               util::format_double(r.flow_competitor);
    std::string status = r.status();
    if (status == "separated") { status = "pass"; }
    if (status == "not separated") { status = "fail"; }
    rows.push_back({"prop3 shared substring carries more flow", status, detail});
}

} // namespace

int cmd_oracle(OracleParams const& p, std::ostream& out) {
    std::vector<OracleRow> rows;
    bool const all = p.which == "all";
    if (!all && p.which != "prop1" && p.which != "prop2" && p.which != "prop3") {
        throw ConfigError("oracle: unknown check '" + p.which + "' (prop1, prop2, prop3 or all)");
    }
    if (p.n < 1) { throw ConfigError("oracle: --n must be >= 1"); }
    if (!(p.gamma > 1.0) || !(p.chain_gamma > 1.0)) { throw ConfigError("oracle: gamma must exceed 1"); }
    if (p.substring < 1 || p.substring > p.length || p.length > 12) {
        throw ConfigError("oracle: need 1 <= --substring <= --length <= 12");
    }
    if (p.alpha && !(*p.alpha > 1.0)) { throw ConfigError("oracle: --alpha must exceed 1"); }
    if (all || p.which == "prop1") { oracle_prop1(p, rows); }
    if (all || p.which == "prop2") { oracle_prop2(p, rows); }
    if (all || p.which == "prop3") { oracle_prop3(p, rows); }
    std::string params = "which=" + p.which + " n=" + std::to_string(p.n) + " gamma=" + util::format_double(p.gamma) +
                         " chains=" + std::to_string(p.chains) + " chain_gamma=" + util::format_double(p.chain_gamma) +
                         " length=" + std::to_string(p.length) + " substring=" + std::to_string(p.substring) +
                         " alpha=" + (p.alpha ? util::format_double(*p.alpha) : std::string("solved"));
    std::string text = "# seed=" + std::to_string(p.seed) + " config_hash=" + util::hex64(util::fnv1a(params)) + '\n';
    bool failed = false;
    for (auto const& row : rows) {
        text += row.status + " | " + row.check + " | " + row.detail + '\n';
        failed = failed || row.status == "fail";
    }
    out << text;
    if (p.out) {
        std::filesystem::create_directories(*p.out);
        write_file(*p.out / "oracle.txt", text);
    }
    return failed ? exit_failure : exit_ok;
}

double final_metric(train::RunLog const& log, std::string const& metric) {
    if (log.rows.empty()) { throw ConfigError("compare: the run produced no log rows (train.n_rounds = 0)"); }
    auto const& r = log.rows.back();
    if (metric == "r1") { return r.r1; }
    if (metric == "r2") { return r.r2; }
    if (metric == "r3") { return r.r3; }
    if (metric == "l1") { return r.l1; }
    if (metric == "loss") { return r.loss; }
    if (metric == "logZ") { return r.log_z; }
    throw ConfigError("compare: unknown metric '" + metric + "' (r1, r2, r3, l1, loss, logZ)");
}

std::vector<std::string> compare_labels(std::vector<RunConfig> const& configs) {
    std::vector<std::map<std::string, std::string>> values;
    for (auto const& c : configs) {
        std::map<std::string, std::string> kv;
        for (auto const& line : util::split(echo(c), '\n')) {
            auto const eq = line.find('=');
            if (eq != std::string::npos) {
                kv[std::string(util::trim(line.substr(0, eq)))] = std::string(util::trim(line.substr(eq + 1)));
            }
        }
        values.push_back(std::move(kv));
    }
    std::vector<std::string> differing;
    for (auto const& key : config_keys()) {
        if (key == "run.seed" || key == "run.output") { continue; }
        bool const same = std::all_of(values.begin(), values.end(), [&](auto const& kv) { return kv.at(key) == values.front().at(key); });
        if (!same) { differing.push_back(key); }
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<std::string> parts;
        for (auto const& key : differing) { parts.push_back(key + "=" + values[i].at(key)); }
        labels.push_back(parts.empty() ? "config" + std::to_string(i + 1) : util::join(parts, ";"));
    }
    return labels;
}

int cmd_compare(std::vector<RunConfig> const& configs, std::vector<std::uint64_t> const& seeds,
                std::string const& metric, std::filesystem::path const& out_dir, std::ostream& out) {
    if (configs.size() < 2) { throw ConfigError("compare: needs at least two configs"); }
    if (seeds.empty()) { throw ConfigError("compare: needs at least one seed"); }
    (void)final_metric(train::RunLog{{train::RoundRecord{}}}, metric);
    std::string env_text;
    for (auto const& c : configs) {
        auto const env = validate(c);
        if (env_text.empty()) {
            env_text = env->describe();
        } else if (env->describe() != env_text) {
            throw ConfigError("compare: configs use different environments (" + env_text + " vs " + env->describe() + ")");
        }
    }
    auto const labels = compare_labels(configs);
    std::vector<std::vector<double>> table(seeds.size(), std::vector<double>(configs.size()));
    for (std::size_t j = 0; j < configs.size(); ++j) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            RunConfig c = configs[j];
            c.seed = seeds[i];
            auto const run = train_run(c);
            if (run.result.aborted) { throw ConfigError("compare: " + labels[j] + " aborted: " + run.result.diagnostic); }
            table[i][j] = final_metric(run.result.log, metric);
        }
    }
    std::string all_echo;
    for (auto const& c : configs) { all_echo += echo(c); }
    std::vector<std::string> seed_text;
    for (auto s : seeds) { seed_text.push_back(std::to_string(s)); }
    std::string csv = "# seed=" + util::join(seed_text, ",") + " config_hash=" + util::hex64(util::fnv1a(all_echo)) +
                      " metric=" + metric + '\n';
    csv += "seed";
    for (auto const& l : labels) { csv += ',' + csv_field(l); }
    csv += '\n';
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        csv += seed_text[i];
        for (double v : table[i]) { csv += ',' + util::format_double(v); }
        csv += '\n';
    }
    std::string mean_row = "mean";
    std::string std_row = "std";
    for (std::size_t j = 0; j < configs.size(); ++j) {
        double mean = 0.0;
        for (auto const& row : table) { mean += row[j]; }
        mean /= static_cast<double>(seeds.size());
        double ss = 0.0;
        for (auto const& row : table) { ss += (row[j] - mean) * (row[j] - mean); }
        double const sd = seeds.size() > 1 ? std::sqrt(ss / static_cast<double>(seeds.size() - 1)) : 0.0;
        mean_row += ',' + util::format_double(mean);
        std_row += ',' + util::format_double(sd);
    }
    csv += mean_row + '\n' + std_row + '\n';
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "compare.csv", csv);
    out << csv;
    return exit_ok;
}

} // namespace opgfn::cli
