#include "opgfn/gfn/model.hpp"

#include <algorithm>

#include "opgfn/ad/softmax.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/util/format.hpp"

namespace opgfn::gfn {

std::string to_string(ModelType t) { return t == ModelType::tabular ? "tabular" : "mlp"; }

ModelType parse_model_type(std::string const& text) {
    if (text == "tabular") { return ModelType::tabular; }
    if (text == "mlp") { return ModelType::mlp; }
    throw ConfigError("model.type: unknown model type '" + text + "'");
}

FlowModel::FlowModel(env::Environment const& env, ModelSpec spec, BackwardMode backward)
    : env_(&env), spec_(std::move(spec)), trainable_backward_(backward != BackwardMode::uniform),
      n_forward_(env.num_forward_actions()), n_backward_(env.num_backward_actions()) {
    log_z_slot_ = params_.add_slice("log_z", 1);
    params_[log_z_slot_] = spec_.init_log_z;
    std::size_t const width = n_forward_ + (trainable_backward_ ? n_backward_ : 0) + 1;
    if (spec_.type == ModelType::tabular) {
        if (spec_.preference_dim > 0) { throw ConfigError("model.type: preference conditioning needs an mlp model"); }
        auto const states = env.state_count();
        if (!states || *states > max_tabular_states) {
            throw ConfigError("model.type: state space too large for a tabular model");
        }
        table_ = ad::Table(params_, "table", static_cast<std::size_t>(*states), width);
    } else {
        net_ = ad::Mlp(params_, "mlp", env.feature_width() + spec_.preference_dim, spec_.hidden, width,
                       spec_.activation);
        net_.initialize(params_, spec_.seed);
    }
}

std::string FlowModel::describe() const {
    std::string out = "model type=" + to_string(spec_.type);
    if (spec_.type == ModelType::mlp) {
        std::vector<std::string> h;
        for (auto w : spec_.hidden) { h.push_back(std::to_string(w)); }
        out += " hidden=" + util::join(h, "x") + " activation=" + ad::to_string(spec_.activation);
    }
    out += " backward=" + std::string(trainable_backward_ ? "trainable" : "uniform");
    out += " preference_dim=" + std::to_string(spec_.preference_dim);
    out += " params=" + std::to_string(params_.size());
    return out;
}

std::vector<double> FlowModel::input(env::State const& s, std::span<double const> preference) const {
    if (preference.size() != spec_.preference_dim) {
        throw ContractViolation("preference vector has width " + std::to_string(preference.size()) + ", expected " +
                                std::to_string(spec_.preference_dim));
    }
    std::vector<double> x(env_->feature_width() + spec_.preference_dim);
    env_->featurize(s, std::span<double>(x).first(env_->feature_width()));
    std::copy(preference.begin(), preference.end(), x.begin() + static_cast<std::ptrdiff_t>(env_->feature_width()));
    return x;
}

std::size_t FlowModel::table_slot(env::State const& s, std::size_t column) const {
    if (spec_.type != ModelType::tabular) { throw ContractViolation("table_slot needs a tabular model"); }
    if (column > flow_column()) { throw ContractViolation("table column out of range"); }
    return table_.slot(env_->state_index(s), column);
}

Heads FlowModel::evaluate(env::State const& s, std::span<double const> preference) const {
    std::vector<double> out;
    if (spec_.type == ModelType::tabular) {
        if (!preference.empty()) { throw ContractViolation("tabular models take no preference input"); }
        auto row = table_.row(params_, env_->state_index(s));
        out.assign(row.begin(), row.end());
    } else {
        out = net_.forward(params_, input(s, preference));
    }
    Heads h;
    auto const f_end = out.begin() + static_cast<std::ptrdiff_t>(n_forward_);
    h.forward.assign(out.begin(), f_end);
    if (trainable_backward_) { h.backward.assign(f_end, f_end + static_cast<std::ptrdiff_t>(n_backward_)); }
    h.log_flow = std::clamp(out.back(), -ad::logit_clip, ad::logit_clip);
    return h;
}

HeadVars FlowModel::record(ad::Tape& tape, env::State const& s, std::span<double const> preference,
                           HeadRequest request) const {
    HeadVars h;
    std::size_t const b_begin = n_forward_;
    std::size_t const flow_col = n_forward_ + (trainable_backward_ ? n_backward_ : 0);
    if (spec_.type == ModelType::tabular) {
        if (!preference.empty()) { throw ContractViolation("tabular models take no preference input"); }
        auto const row = env_->state_index(s);
        if (request.forward) {
            for (std::size_t c = 0; c < n_forward_; ++c) { h.forward.push_back(tape.param(table_.slot(row, c))); }
        }
        if (request.backward && trainable_backward_) {
            for (std::size_t c = 0; c < n_backward_; ++c) {
                h.backward.push_back(tape.param(table_.slot(row, b_begin + c)));
            }
        }
        if (request.flow) {
            h.log_flow = ad::clamp(tape.param(table_.slot(row, flow_col)), -ad::logit_clip, ad::logit_clip);
        }
        return h;
    }
    auto out = net_.forward(tape, input(s, preference));
    h.forward.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n_forward_));
    if (trainable_backward_) {
        h.backward.assign(out.begin() + static_cast<std::ptrdiff_t>(b_begin),
                          out.begin() + static_cast<std::ptrdiff_t>(b_begin + n_backward_));
    }
    h.log_flow = ad::clamp(out[flow_col], -ad::logit_clip, ad::logit_clip);
    return h;
}

} // namespace opgfn::gfn
