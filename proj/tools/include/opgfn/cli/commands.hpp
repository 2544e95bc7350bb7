#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opgfn/ad/checkpoint.hpp"
#include "opgfn/cli/run_config.hpp"
#include "opgfn/gfn/model.hpp"
#include "opgfn/metrics/indicators.hpp"
#include "opgfn/train/trainer.hpp"

namespace opgfn::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_capability = 3;
inline constexpr int exit_aborted = 4;

// Environment, model and trainer for one resolved config.
struct Run {
    RunConfig config;
    std::unique_ptr<env::Environment> env;
    std::unique_ptr<gfn::FlowModel> model;
    std::unique_ptr<train::Trainer> trainer;
    train::TrainResult result;
};

[[nodiscard]] Run train_run(RunConfig const& c, std::function<void(Run&, std::size_t)> const& on_checkpoint = {});

// Header: env hash and description, model, seed, config hash, round and
// optimizer step. Blocks: params, the Adam moments and the visit window.
[[nodiscard]] ad::Checkpoint make_checkpoint(RunConfig const& c, env::Environment const& env,
                                             gfn::FlowModel const& model, ad::Adam const* adam,
                                             metrics::VisitTracker const* tracker, std::size_t round);
// Model built from the config with parameters from the checkpoint. Throws
// ConfigError naming both env hashes when they differ.
[[nodiscard]] gfn::FlowModel restore_model(RunConfig const& c, env::Environment const& env,
                                           ad::Checkpoint const& ck);

// `count` terminals from the model at epsilon 0 and temperature 1, one
// independent stream per candidate derived from (seed, round, index).
[[nodiscard]] std::vector<gfn::Trajectory> sample_candidates(RunConfig const& c, env::Environment const& env,
                                                             gfn::FlowModel const& model, std::size_t round,
                                                             std::size_t count);

[[nodiscard]] metrics::IndicatorReport indicator_report(std::vector<env::ObjectiveVector> const& candidates,
                                                        env::Environment const& env, EvalConfig const& eval);
// Selected indicators plus the counts, as `key = value` lines.
[[nodiscard]] std::string format_report(metrics::IndicatorReport const& r, EvalConfig const& eval);

// Each command writes into config.output and returns an exit code. Errors
// surface as exceptions (ConfigError, CapabilityError, ...).
int cmd_train(RunConfig const& c, std::ostream& out);
int cmd_eval_moo(RunConfig const& c, std::filesystem::path const& checkpoint, std::ostream& out);
// Without a checkpoint the model is evaluated at initialization.
int cmd_diagnose(RunConfig const& c, std::optional<std::filesystem::path> const& checkpoint, std::ostream& out);
int cmd_sample(RunConfig const& c, std::filesystem::path const& checkpoint, std::ostream& out);

struct OracleParams {
    std::string which = "all";
    std::size_t n = 4;
    double gamma = 16.0;
    // Chains for the piecewise-solution check and their box bound.
    std::size_t chains = 50;
    double chain_gamma = 1e6;
    std::size_t length = 6;
    std::size_t substring = 3;
    // When set, the separation check uses this alpha instead of solving for it.
    std::optional<double> alpha;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> out;
};

int cmd_oracle(OracleParams const& p, std::ostream& out);

// Metric names: r1, r2, r3, l1, loss, logZ (final log row).
[[nodiscard]] double final_metric(train::RunLog const& log, std::string const& metric);

int cmd_compare(std::vector<RunConfig> const& configs, std::vector<std::uint64_t> const& seeds,
                std::string const& metric, std::filesystem::path const& out_dir, std::ostream& out);

// Column labels: the keys whose values differ across configs, as key=value.
[[nodiscard]] std::vector<std::string> compare_labels(std::vector<RunConfig> const& configs);

} // namespace opgfn::cli
