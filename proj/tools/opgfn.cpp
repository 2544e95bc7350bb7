#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opgfn/cli/commands.hpp"
#include "opgfn/errors.hpp"

namespace {

using opgfn::cli::RunConfig;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
    auto* opt = cmd->add_option("--config", c.config, "Run config file (section.key = value lines)");
    if (config_required) { opt->required(); }
    cmd->add_option("--seed", c.seed, "Override run.seed");
    cmd->add_option("--out", c.out, "Override run.output");
}

RunConfig load(Common const& c) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : opgfn::cli::load_run_config(c.config);
    if (c.seed) { cfg.seed = *c.seed; }
    if (c.out) { cfg.output = *c.out; }
    opgfn::cli::resolve(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order-preserving GFlowNet experiments"};
    app.require_subcommand(1);

    Common common;
    std::string checkpoint;
    std::optional<std::size_t> candidates;
    std::optional<std::size_t> rounds;
    std::optional<double> boost;

    auto* train = app.add_subcommand("train", "Train a model and write the run log, checkpoint and config echo");
    add_common(train, common);

    auto* eval = app.add_subcommand("eval-moo", "Sample candidates and score them against the reference front");
    add_common(eval, common);
    eval->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();
    eval->add_option("--candidates", candidates, "Candidates per round (eval.candidates)");
    eval->add_option("--rounds", rounds, "Sampling rounds (eval.rounds)");

    auto* diagnose = app.add_subcommand("diagnose", "Exploration ratios, L1 to target and the learned reward landscape");
    add_common(diagnose, common);
    diagnose->add_option("--checkpoint", checkpoint, "Checkpoint written by train; omitted means untrained");

    auto* sample = app.add_subcommand("sample", "Boosted sampling: draw K = k * ratio terminals, keep the top k");
    add_common(sample, common);
    sample->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();
    sample->add_option("--candidates", candidates, "Number k of kept terminals (eval.candidates)");
    sample->add_option("--boost-ratio", boost, "r_boost = K / k (eval.boost_ratio)");

    opgfn::cli::OracleParams oracle_params;
    std::optional<double> alpha;
    std::string oracle_out;
    auto* oracle = app.add_subcommand("oracle", "Check the closed-form chain solutions and the substring-flow bound");
    oracle->add_option("which", oracle_params.which, "prop1, prop2, prop3 or all")->check(CLI::IsMember({"prop1", "prop2", "prop3", "all"}));
    oracle->add_option("--n", oracle_params.n, "Chain length for prop1");
    oracle->add_option("--gamma", oracle_params.gamma, "Box bound for prop1");
    oracle->add_option("--chains", oracle_params.chains, "Random chains for prop2");
    oracle->add_option("--chain-gamma", oracle_params.chain_gamma, "Box bound for prop2 and prop3");
    oracle->add_option("--length", oracle_params.length, "Sequence length l for prop3");
    oracle->add_option("--substring", oracle_params.substring, "Substring length k for prop3");
    oracle->add_option("--alpha", alpha, "Force alpha in the prop3 separation check");
    oracle->add_option("--seed", oracle_params.seed, "Seed for the random chains");
    oracle->add_option("--out", oracle_out, "Directory for oracle.txt");

    std::vector<std::string> compare_configs;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::string metric = "r3";
    std::string compare_out = "out";
    auto* compare = app.add_subcommand("compare", "Train several configs on shared seeds and tabulate a final metric");
    compare->add_option("--config", compare_configs, "Config files (two or more)")->required();
    compare->add_option("--seeds", seeds, "Seed list")->delimiter(',');
    compare->add_option("--metric", metric, "r1, r2, r3, l1, loss or logZ");
    compare->add_option("--out", compare_out, "Directory for compare.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) { return opgfn::cli::cmd_train(load(common), std::cout); }
        if (eval->parsed()) {
            auto cfg = load(common);
            if (candidates) { cfg.eval.candidates = *candidates; }
            if (rounds) { cfg.eval.rounds = *rounds; }
            return opgfn::cli::cmd_eval_moo(cfg, checkpoint, std::cout);
        }
        if (diagnose->parsed()) {
            std::optional<std::filesystem::path> ck;
            if (!checkpoint.empty()) { ck = checkpoint; }
            return opgfn::cli::cmd_diagnose(load(common), ck, std::cout);
        }
        if (sample->parsed()) {
            auto cfg = load(common);
            if (candidates) { cfg.eval.candidates = *candidates; }
            if (boost) { cfg.eval.boost_ratio = *boost; }
            return opgfn::cli::cmd_sample(cfg, checkpoint, std::cout);
        }
        if (oracle->parsed()) {
            oracle_params.alpha = alpha;
            if (!oracle_out.empty()) { oracle_params.out = oracle_out; }
            return opgfn::cli::cmd_oracle(oracle_params, std::cout);
        }
        if (compare->parsed()) {
            std::vector<RunConfig> configs;
            for (auto const& path : compare_configs) { configs.push_back(opgfn::cli::load_run_config(path)); }
            return opgfn::cli::cmd_compare(configs, seeds, metric, compare_out, std::cout);
        }
    } catch (opgfn::ConfigError const& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return opgfn::cli::exit_config;
    } catch (opgfn::PreconditionError const& e) {
        std::cerr << "precondition: " << e.what() << '\n';
        return opgfn::cli::exit_config;
    } catch (opgfn::CapabilityError const& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return opgfn::cli::exit_capability;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return opgfn::cli::exit_failure;
    }
    return opgfn::cli::exit_failure;
}
