#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "opgfn/ad/adam.hpp"
#include "opgfn/env/environment.hpp"
#include "opgfn/gfn/config.hpp"
#include "opgfn/gfn/model.hpp"
#include "opgfn/metrics/exploration.hpp"
#include "opgfn/train/replay.hpp"
#include "opgfn/train/sampler.hpp"

namespace opgfn::train {

struct TrainPlan {
    std::size_t n_init = 200;
    std::size_t n_rounds = 100;
    std::size_t n_new = 200;
    std::size_t n_off = 0;
    std::size_t n_off_per = 1;
    std::size_t batch_size = 200;
    std::uint64_t seed = 0;
    // Prioritized replay for the augmented terminals (single objective only).
    bool prt = false;
    double alpha1 = 50.0;
    double alpha2 = 10.0;
    std::size_t replay_capacity = 100'000;
    // Uniform-policy terminals placed in the buffer before training.
    std::size_t warmup = 0;
    // Replace the update on fresh samples by an update on a uniform buffer
    // draw of the same size.
    bool replay_resample = false;
    // Polyak factor for a separate sampling copy of the parameters; 0 samples
    // from the trained parameters directly.
    double soft_update_tau = 0.0;
    double lr = 1e-3;
    double lr_log_z = 0.1;
    double clip_grad_norm = 10.0;
    std::size_t checkpoint_every = 0;
    // Walk augmented trajectories with the learned P_B instead of uniformly.
    bool augment_with_pb = false;
    std::size_t visit_window = metrics::default_visit_window;
    std::size_t recent_window = metrics::default_recent_window;
    // When false the seconds column is written as 0 so logs are bit-identical.
    bool wall_clock = false;
};

// Throws ConfigError naming the offending field.
void validate(TrainPlan const& plan, env::Environment const& env, gfn::LossConfig const& loss,
              gfn::ModelSpec const& model);

struct RoundRecord {
    std::size_t round = 0;
    std::size_t cum_samples = 0;
    double loss = 0.0;
    double log_z = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
    double l1 = 0.0;
    double seconds = 0.0;
};

struct RunLog {
    std::vector<RoundRecord> rows;

    static constexpr char const* csv_header =
        "round,cum_samples,loss,logZ,ratio_visited,ratio_max_found,ratio_max_recent,l1_error,seconds";
    [[nodiscard]] std::string to_csv() const;
};

struct TrainResult {
    RunLog log;
    bool aborted = false;
    std::string diagnostic;
    std::size_t updates = 0;
    double last_loss = 0.0;
};

class Trainer {
public:
    Trainer(env::Environment const& env, gfn::FlowModel& model, TrainPlan plan, gfn::LossConfig loss);

    // Runs the initialization and every round. `on_checkpoint` is called
    // with the round index every plan.checkpoint_every rounds.
    TrainResult run(std::function<void(std::size_t)> const& on_checkpoint = {});

    [[nodiscard]] ReplayBuffer const& buffer() const { return buffer_; }
    [[nodiscard]] ad::Adam const& optimizer() const { return adam_; }
    [[nodiscard]] ad::Adam& optimizer() { return adam_; }
    // Null when the environment is not enumerable.
    [[nodiscard]] metrics::VisitTracker const* tracker() const { return tracker_.get(); }
    [[nodiscard]] gfn::FlowModel const& sampling_model() const;
    [[nodiscard]] std::size_t online_samples() const { return online_; }

private:
    enum class Stream : std::uint64_t { init = 0, online, augment, replay, warmup, resample };

    [[nodiscard]] std::mt19937_64 stream(Stream s, std::size_t round, std::size_t index) const;
    [[nodiscard]] std::vector<double> preference_for(std::mt19937_64& rng) const;
    [[nodiscard]] std::vector<gfn::Trajectory> sample_online(std::size_t round, std::size_t count, Stream s,
                                                             SamplingPolicy const& policy);
    void admit(std::vector<gfn::Trajectory> const& batch, std::size_t round, bool visit);
    [[nodiscard]] std::vector<gfn::Trajectory> augment(std::vector<ReplayEntry> const& entries, std::size_t per,
                                                       std::size_t round, Stream s);
    [[nodiscard]] std::vector<ReplayEntry> draw_offline(std::size_t count, std::size_t round);
    // One pass of minibatches; returns false after two consecutive non-finite losses.
    bool update(std::vector<gfn::Trajectory> const& data, TrainResult& result, double& loss_sum,
                std::size_t& loss_count);

    env::Environment const* env_;
    gfn::FlowModel* model_;
    TrainPlan plan_;
    gfn::LossConfig loss_;
    ad::Adam adam_;
    ReplayBuffer buffer_;
    std::unique_ptr<metrics::VisitTracker> tracker_;
    std::optional<gfn::FlowModel> sampler_;
    std::size_t online_ = 0;
    std::size_t non_finite_streak_ = 0;
};

// Samples K terminals, ranks them by the learned log reward and returns the
// top k trajectories (stable in sampling order). Objectives stay empty.
[[nodiscard]] std::vector<gfn::Trajectory> boost_sample(env::Environment const& env, gfn::FlowModel const& model,
                                                        gfn::Criterion criterion, SamplingPolicy const& policy,
                                                        std::size_t big_k, std::size_t small_k, std::mt19937_64& rng,
                                                        std::span<double const> preference = {});

} // namespace opgfn::train
