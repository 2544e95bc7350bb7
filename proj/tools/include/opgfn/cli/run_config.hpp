#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "opgfn/env/factory.hpp"
#include "opgfn/gfn/config.hpp"
#include "opgfn/gfn/model.hpp"
#include "opgfn/train/trainer.hpp"

namespace opgfn::cli {

struct EvalConfig {
    // Any of gd, igd, gd_plus, igd_plus, d_h, hv, pc_ent, r2.
    std::vector<std::string> indicators{"gd", "igd", "gd_plus", "igd_plus", "d_h", "hv", "pc_ent", "r2"};
    std::size_t front_resolution = 64;
    std::size_t r2_divisions = 10;
    // Empty means the origin.
    std::vector<double> hv_reference;
    // Candidates per sampling round and number of rounds.
    std::size_t candidates = 128;
    std::size_t rounds = 10;
    double boost_ratio = 1.0;
};

// One run: `section.key = value` lines over the sections env, model, loss,
// train, eval and run. The run seed drives model initialization and training;
// model.preference_dim is derived from loss.preference.
struct RunConfig {
    env::EnvSpec env;
    gfn::ModelSpec model;
    gfn::LossConfig loss;
    train::TrainPlan train;
    EvalConfig eval;
    std::string output = "out";
    std::uint64_t seed = 0;
};

// Throws ConfigError naming the key (unknown, duplicated or malformed).
[[nodiscard]] RunConfig parse_run_config(std::string_view text);
[[nodiscard]] RunConfig load_run_config(std::string const& path);

// Every key with its resolved value, one per line, in a fixed order.
[[nodiscard]] std::string echo(RunConfig const& c);
[[nodiscard]] std::vector<std::string> config_keys();

[[nodiscard]] bool operator==(RunConfig const& a, RunConfig const& b);

// Hex content hash of the echo text.
[[nodiscard]] std::string config_hash(RunConfig const& c);
// "# seed=S config_hash=H"
[[nodiscard]] std::string output_header(RunConfig const& c);

// Copies the run seed into the model and train sections.
void resolve(RunConfig& c);

// Model spec with the preference width derived for `env`.
[[nodiscard]] gfn::ModelSpec model_spec(RunConfig const& c, env::Environment const& env);

// Builds the environment and checks every section against it.
[[nodiscard]] std::unique_ptr<env::Environment> validate(RunConfig const& c);

// Hex hash of the environment's canonical description.
[[nodiscard]] std::string env_hash(env::Environment const& env);

} // namespace opgfn::cli
