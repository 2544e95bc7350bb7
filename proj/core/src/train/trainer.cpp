#include "opgfn/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "opgfn/ad/tape.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/gfn/composite.hpp"
#include "opgfn/gfn/losses.hpp"
#include "opgfn/util/format.hpp"
#include "opgfn/util/hash.hpp"

namespace opgfn::train {

void validate(TrainPlan const& plan, env::Environment const& env, gfn::LossConfig const& loss,
              gfn::ModelSpec const& model) {
    gfn::validate(loss, env.objective_dim());
    if (plan.n_off_per == 0) { throw ConfigError("train.n_off_per must be >= 1"); }
    if (plan.batch_size == 0) { throw ConfigError("train.batch_size must be >= 1"); }
    if (plan.replay_capacity == 0) { throw ConfigError("train.replay_capacity must be >= 1"); }
    if (plan.replay_capacity < plan.warmup) { throw ConfigError("train.replay_capacity must be >= train.warmup"); }
    if (plan.n_init == 0) { throw ConfigError("train.n_init must be >= 1"); }
    if (!(plan.alpha1 >= 0.0 && plan.alpha1 <= 100.0)) { throw ConfigError("train.alpha1 must lie in [0, 100]"); }
    if (!(plan.alpha2 > 0.0 && plan.alpha2 <= 100.0)) { throw ConfigError("train.alpha2 must lie in (0, 100]"); }
    if (!(plan.soft_update_tau >= 0.0 && plan.soft_update_tau < 1.0)) {
        throw ConfigError("train.soft_update_tau must lie in [0, 1)");
    }
    if (!(plan.lr > 0.0) || !(plan.lr_log_z > 0.0)) { throw ConfigError("train.lr and train.lr_log_z must be > 0"); }
    if (!(plan.clip_grad_norm >= 0.0)) { throw ConfigError("train.clip_grad_norm must be >= 0"); }
    if (plan.visit_window == 0 || plan.recent_window == 0) {
        throw ConfigError("eval.visit_window and eval.recent_window must be >= 1");
    }
    bool const conditioned = loss.preference == gfn::Preference::dirichlet;
    if (conditioned && model.preference_dim != env.objective_dim()) {
        throw ConfigError("model.preference_dim must equal the number of objectives for dirichlet preferences");
    }
    if (!conditioned && model.preference_dim != 0) {
        throw ConfigError("model.preference_dim must be 0 unless loss.preference is dirichlet");
    }
    if (loss.order_preserving && plan.batch_size < 2) {
        throw ConfigError("train.batch_size must be >= 2 with order preservation");
    }
}

std::string RunLog::to_csv() const {
    std::ostringstream out;
    out << csv_header << '\n';
    for (auto const& r : rows) {
        out << r.round << ',' << r.cum_samples << ',' << util::format_double(r.loss) << ','
            << util::format_double(r.log_z) << ',' << util::format_double(r.r1) << ',' << util::format_double(r.r2)
            << ',' << util::format_double(r.r3) << ',' << util::format_double(r.l1) << ','
            << util::format_double(r.seconds) << '\n';
    }
    return out.str();
}

namespace {

ad::AdamConfig adam_config(gfn::FlowModel const& model, TrainPlan const& plan) {
    ad::AdamConfig c;
    c.lr = plan.lr;
    c.clip_norm = plan.clip_grad_norm;
    c.slice_lr[model.params().slices().front().name] = plan.lr_log_z;
    return c;
}

} // namespace

Trainer::Trainer(env::Environment const& env, gfn::FlowModel& model, TrainPlan plan, gfn::LossConfig loss)
    : env_(&env), model_(&model), plan_(plan), loss_(std::move(loss)), adam_(model.params(), adam_config(model, plan)),
      buffer_(plan.replay_capacity) {
    validate(plan_, env, loss_, model.spec());
    if (&model.environment() != &env) { throw ContractViolation("model was built for a different environment"); }
    if (env.enumerable()) {
        tracker_ = std::make_unique<metrics::VisitTracker>(env, loss_.beta, plan_.visit_window, plan_.recent_window);
    }
    if (plan_.soft_update_tau > 0.0) { sampler_.emplace(model); }
}

gfn::FlowModel const& Trainer::sampling_model() const { return sampler_ ? *sampler_ : *model_; }

std::mt19937_64 Trainer::stream(Stream s, std::size_t round, std::size_t index) const {
    auto const tag = static_cast<std::uint64_t>(s) << 40;
    return std::mt19937_64(util::derive_seed(plan_.seed, round, tag | index));
}

std::vector<double> Trainer::preference_for(std::mt19937_64& rng) const {
    if (loss_.preference != gfn::Preference::dirichlet) { return {}; }
    return draw_dirichlet(env_->objective_dim(), loss_.dirichlet_alpha, rng);
}

std::vector<gfn::Trajectory> Trainer::sample_online(std::size_t round, std::size_t count, Stream s,
                                                    SamplingPolicy const& policy) {
    std::vector<gfn::Trajectory> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto rng = stream(s, round, i);
        auto const pref = preference_for(rng);
        out.push_back(sample_trajectory(*env_, sampling_model(), policy, rng, pref));
        // Caches are recomputed under the trained parameters for the losses.
        if (sampler_) { fill_log_probs(*model_, out.back()); }
    }
    return out;
}

void Trainer::admit(std::vector<gfn::Trajectory> const& batch, std::size_t round, bool visit) {
    for (auto const& t : batch) {
        buffer_.add(ReplayEntry{t.terminal(), t.objective, round});
        if (visit && tracker_) { tracker_->record(t.terminal()); }
    }
    if (visit) { online_ += batch.size(); }
}

std::vector<gfn::Trajectory> Trainer::augment(std::vector<ReplayEntry> const& entries, std::size_t per,
                                              std::size_t round, Stream s) {
    std::vector<gfn::Trajectory> out;
    out.reserve(entries.size() * per);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto rng = stream(s, round, i);
        auto const pref = preference_for(rng);
        auto batch = augment_backward(*env_, *model_, entries[i].terminal, entries[i].objective, per,
                                      plan_.augment_with_pb, rng, pref);
        for (auto& t : batch) { out.push_back(std::move(t)); }
    }
    return out;
}

std::vector<ReplayEntry> Trainer::draw_offline(std::size_t count, std::size_t round) {
    auto rng = stream(Stream::replay, round, 0);
    if (plan_.prt && env_->objective_dim() == 1) {
        std::vector<double> scores;
        scores.reserve(buffer_.size());
        for (auto const& e : buffer_.entries()) { scores.push_back(e.objective.front()); }
        return prt_sample(buffer_, scores, count, plan_.alpha1, plan_.alpha2, rng);
    }
    return buffer_.sample_uniform(count, rng);
}

bool Trainer::update(std::vector<gfn::Trajectory> const& data, TrainResult& result, double& loss_sum,
                     std::size_t& loss_count) {
    std::size_t const b = plan_.batch_size;
    std::size_t start = 0;
    while (start < data.size()) {
        std::size_t end = std::min(start + b, data.size());
        // A lone trailing trajectory has no pairs to order; fold it into this batch.
        if (loss_.order_preserving && data.size() - end == 1) { end = data.size(); }
        std::span<gfn::Trajectory const> batch(data.data() + start, end - start);
        start = end;
        if (loss_.order_preserving && batch.size() < 2) { continue; }

        ad::Tape tape(model_->params());
        auto const breakdown = gfn::composite_loss(tape, *model_, batch, loss_);
        double const value = breakdown.total.value();
        bool ok = std::isfinite(value);
        if (ok) {
            auto const grad = tape.backward(breakdown.total);
            auto const step = adam_.step(model_->params(), grad);
            ok = step.applied;
            if (!ok) { result.diagnostic = step.diagnostic; }
        } else {
            result.diagnostic = "non-finite loss " + util::format_double(value);
        }
        if (!ok) {
            if (++non_finite_streak_ >= 2) {
                result.aborted = true;
                result.diagnostic = "aborted after two consecutive non-finite updates: " + result.diagnostic;
                return false;
            }
            continue;
        }
        non_finite_streak_ = 0;
        ++result.updates;
        result.last_loss = value;
        loss_sum += value;
        ++loss_count;
        if (sampler_) {
            auto dst = sampler_->params().values();
            auto const& src = model_->params().values();
            double const tau = plan_.soft_update_tau;
            for (std::size_t i = 0; i < dst.size(); ++i) { dst[i] = tau * dst[i] + (1.0 - tau) * src[i]; }
        }
    }
    return true;
}

TrainResult Trainer::run(std::function<void(std::size_t)> const& on_checkpoint) {
    TrainResult result;
    auto const t0 = std::chrono::steady_clock::now();
    SamplingPolicy const uniform{1.0, 1.0};
    SamplingPolicy const online{loss_.epsilon, loss_.temperature};

    if (plan_.warmup > 0) { admit(sample_online(0, plan_.warmup, Stream::warmup, uniform), 0, false); }
    auto fresh = sample_online(0, plan_.n_init, Stream::init, uniform);
    admit(fresh, 0, true);

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    auto on_policy_data = [&](std::size_t round) {
        if (!plan_.replay_resample) { return fresh; }
        auto rng = stream(Stream::replay, round, 1);
        return augment(buffer_.sample_uniform(fresh.size(), rng), 1, round, Stream::resample);
    };

    if (plan_.n_rounds == 0) {
        update(on_policy_data(0), result, loss_sum, loss_count);
        return result;
    }

    for (std::size_t round = 1; round <= plan_.n_rounds; ++round) {
        loss_sum = 0.0;
        loss_count = 0;
        if (!update(on_policy_data(round), result, loss_sum, loss_count)) { return result; }

        fresh = sample_online(round, plan_.n_new, Stream::online, online);
        admit(fresh, round, true);

        if (plan_.n_off > 0) {
            auto const extra = augment(draw_offline(plan_.n_off, round), plan_.n_off_per, round, Stream::augment);
            if (!update(extra, result, loss_sum, loss_count)) { return result; }
        }

        RoundRecord row;
        row.round = round;
        row.cum_samples = online_;
        row.loss = loss_count == 0 ? std::nan("") : loss_sum / static_cast<double>(loss_count);
        row.log_z = model_->log_z();
        if (tracker_) {
            auto const r = tracker_->ratios();
            row.r1 = r.r1;
            row.r2 = r.r2;
            row.r3 = r.r3;
            row.l1 = tracker_->l1();
        } else {
            row.r1 = row.r2 = row.r3 = row.l1 = std::nan("");
        }
        if (plan_.wall_clock) {
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        result.log.rows.push_back(row);
        if (on_checkpoint && plan_.checkpoint_every > 0 && round % plan_.checkpoint_every == 0) {
            on_checkpoint(round);
        }
    }
    return result;
}

std::vector<gfn::Trajectory> boost_sample(env::Environment const& env, gfn::FlowModel const& model,
                                          gfn::Criterion criterion, SamplingPolicy const& policy,
                                          std::size_t big_k, std::size_t small_k, std::mt19937_64& rng,
                                          std::span<double const> preference) {
    if (small_k == 0 || big_k < small_k) { throw ContractViolation("boost_sample needs K >= k >= 1"); }
    std::vector<gfn::Trajectory> pool;
    std::vector<double> score;
    pool.reserve(big_k);
    for (std::size_t i = 0; i < big_k; ++i) {
        pool.push_back(sample_trajectory(env, model, policy, rng, preference, false));
        score.push_back(gfn::learned_log_reward_value(model, pool.back(), criterion));
    }
    std::vector<std::size_t> order(big_k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    std::vector<gfn::Trajectory> out;
    out.reserve(small_k);
    for (std::size_t i = 0; i < small_k; ++i) { out.push_back(std::move(pool[order[i]])); }
    return out;
}

} // namespace opgfn::train
