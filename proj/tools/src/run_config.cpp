#include "opgfn/cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "opgfn/errors.hpp"
#include "opgfn/util/format.hpp"
#include "opgfn/util/hash.hpp"

namespace opgfn::cli {

namespace {

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

bool parse_bool(std::string const& v) {
    if (v == "true" || v == "1") { return true; }
    if (v == "false" || v == "0") { return false; }
    throw ConfigError("expected true or false, got '" + v + "'");
}

std::uint64_t parse_u64(std::string const& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("expected a nonnegative integer, got '" + v + "'");
    }
    try {
        return std::stoull(v);
    } catch (std::exception const&) { throw ConfigError("integer out of range: '" + v + "'"); }
}

double parse_num(std::string const& v) {
    try {
        return util::parse_double(v);
    } catch (std::exception const&) { throw ConfigError("expected a number, got '" + v + "'"); }
}

std::vector<std::string> parse_list(std::string const& v) {
    std::vector<std::string> out;
    if (util::trim(v).empty()) { return out; }
    for (auto const& part : util::split(v, ',')) { out.emplace_back(util::trim(part)); }
    return out;
}

std::string fmt_list(std::vector<std::string> const& v) { return util::join(v, ","); }

std::string fmt_doubles(std::vector<double> const& v) { return util::join_doubles(v, ","); }

std::vector<double> parse_doubles(std::string const& v) {
    std::vector<double> out;
    for (auto const& s : parse_list(v)) { out.push_back(parse_num(s)); }
    return out;
}

std::string fmt_sizes(std::vector<std::size_t> const& v) {
    std::vector<std::string> parts;
    for (auto x : v) { parts.push_back(std::to_string(x)); }
    return fmt_list(parts);
}

std::vector<std::size_t> parse_sizes(std::string const& v) {
    std::vector<std::size_t> out;
    for (auto const& s : parse_list(v)) { out.push_back(static_cast<std::size_t>(parse_u64(s))); }
    return out;
}

struct Field {
    std::string key;
    std::function<std::string(RunConfig const&)> get;
    std::function<void(RunConfig&, std::string const&)> set;
};

template <class T>
Field size_field(std::string key, T RunConfig::*section, std::size_t T::*member) {
    return {std::move(key), [=](RunConfig const& c) { return std::to_string(c.*section.*member); },
            [=](RunConfig& c, std::string const& v) { c.*section.*member = static_cast<std::size_t>(parse_u64(v)); }};
}

template <class T>
Field double_field(std::string key, T RunConfig::*section, double T::*member) {
    return {std::move(key), [=](RunConfig const& c) { return util::format_double(c.*section.*member); },
            [=](RunConfig& c, std::string const& v) { c.*section.*member = parse_num(v); }};
}

template <class T>
Field bool_field(std::string key, T RunConfig::*section, bool T::*member) {
    return {std::move(key), [=](RunConfig const& c) { return fmt_bool(c.*section.*member); },
            [=](RunConfig& c, std::string const& v) { c.*section.*member = parse_bool(v); }};
}

template <class T>
Field int_field(std::string key, T RunConfig::*section, int T::*member) {
    return {std::move(key), [=](RunConfig const& c) { return std::to_string(c.*section.*member); },
            [=](RunConfig& c, std::string const& v) {
                auto const x = parse_u64(v);
                if (x > 1'000'000'000) { throw ConfigError("value too large: '" + v + "'"); }
                c.*section.*member = static_cast<int>(x);
            }};
}

std::vector<Field> const& fields() {
    using C = RunConfig;
    static std::vector<Field> const table = [] {
        std::vector<Field> f;
        f.push_back({"run.seed", [](C const& c) { return std::to_string(c.seed); },
                     [](C& c, std::string const& v) { c.seed = parse_u64(v); }});
        f.push_back({"run.output", [](C const& c) { return c.output; },
                     [](C& c, std::string const& v) { c.output = v; }});

        f.push_back({"env.kind", [](C const& c) { return env::to_string(c.env.kind); },
                     [](C& c, std::string const& v) { c.env.kind = env::parse_env_kind(v); }});
        f.push_back(int_field("env.dim", &C::env, &env::EnvSpec::dim));
        f.push_back(int_field("env.side", &C::env, &env::EnvSpec::side));
        f.push_back(double_field("env.r0", &C::env, &env::EnvSpec::r0));
        f.push_back({"env.objectives", [](C const& c) { return fmt_list(c.env.objectives); },
                     [](C& c, std::string const& v) { c.env.objectives = parse_list(v); }});
        f.push_back(int_field("env.alphabet_size", &C::env, &env::EnvSpec::alphabet_size));
        f.push_back(int_field("env.max_length", &C::env, &env::EnvSpec::max_length));
        f.push_back(bool_field("env.early_stop", &C::env, &env::EnvSpec::early_stop));
        f.push_back({"env.seed", [](C const& c) { return std::to_string(c.env.seed); },
                     [](C& c, std::string const& v) { c.env.seed = parse_u64(v); }});
        f.push_back({"env.enumeration_cap", [](C const& c) { return std::to_string(c.env.enumeration_cap); },
                     [](C& c, std::string const& v) { c.env.enumeration_cap = parse_u64(v); }});

        f.push_back({"model.type", [](C const& c) { return gfn::to_string(c.model.type); },
                     [](C& c, std::string const& v) { c.model.type = gfn::parse_model_type(v); }});
        f.push_back({"model.hidden", [](C const& c) { return fmt_sizes(c.model.hidden); },
                     [](C& c, std::string const& v) { c.model.hidden = parse_sizes(v); }});
        f.push_back({"model.activation", [](C const& c) { return ad::to_string(c.model.activation); },
                     [](C& c, std::string const& v) { c.model.activation = ad::parse_activation(v); }});
        f.push_back(double_field("model.init_log_z", &C::model, &gfn::ModelSpec::init_log_z));

        f.push_back({"loss.criterion", [](C const& c) { return gfn::to_string(c.loss.criterion); },
                     [](C& c, std::string const& v) { c.loss.criterion = gfn::parse_criterion(v); }});
        f.push_back(bool_field("loss.order_preserving", &C::loss, &gfn::LossConfig::order_preserving));
        f.push_back(double_field("loss.lambda_op", &C::loss, &gfn::LossConfig::lambda_op));
        f.push_back(double_field("loss.lambda_kl", &C::loss, &gfn::LossConfig::lambda_kl));
        f.push_back(double_field("loss.lambda_subtb", &C::loss, &gfn::LossConfig::lambda_subtb));
        f.push_back(double_field("loss.beta", &C::loss, &gfn::LossConfig::beta));
        f.push_back({"loss.backward", [](C const& c) { return gfn::to_string(c.loss.backward); },
                     [](C& c, std::string const& v) { c.loss.backward = gfn::parse_backward_mode(v); }});
        f.push_back({"loss.pairing", [](C const& c) { return gfn::to_string(c.loss.pairing); },
                     [](C& c, std::string const& v) { c.loss.pairing = gfn::parse_pairing(v); }});
        f.push_back(double_field("loss.epsilon", &C::loss, &gfn::LossConfig::epsilon));
        f.push_back(double_field("loss.temperature", &C::loss, &gfn::LossConfig::temperature));
        f.push_back({"loss.preference", [](C const& c) { return gfn::to_string(c.loss.preference); },
                     [](C& c, std::string const& v) { c.loss.preference = gfn::parse_preference(v); }});
        f.push_back({"loss.preference_weights", [](C const& c) { return fmt_doubles(c.loss.preference_weights); },
                     [](C& c, std::string const& v) { c.loss.preference_weights = parse_doubles(v); }});
        f.push_back(double_field("loss.dirichlet_alpha", &C::loss, &gfn::LossConfig::dirichlet_alpha));

        using P = train::TrainPlan;
        f.push_back(size_field("train.n_init", &C::train, &P::n_init));
        f.push_back(size_field("train.n_rounds", &C::train, &P::n_rounds));
        f.push_back(size_field("train.n_new", &C::train, &P::n_new));
        f.push_back(size_field("train.n_off", &C::train, &P::n_off));
        f.push_back(size_field("train.n_off_per", &C::train, &P::n_off_per));
        f.push_back(size_field("train.batch_size", &C::train, &P::batch_size));
        f.push_back(bool_field("train.prt", &C::train, &P::prt));
        f.push_back(double_field("train.alpha1", &C::train, &P::alpha1));
        f.push_back(double_field("train.alpha2", &C::train, &P::alpha2));
        f.push_back(size_field("train.replay_capacity", &C::train, &P::replay_capacity));
        f.push_back(size_field("train.warmup", &C::train, &P::warmup));
        f.push_back(bool_field("train.replay_resample", &C::train, &P::replay_resample));
        f.push_back(double_field("train.soft_update_tau", &C::train, &P::soft_update_tau));
        f.push_back(double_field("train.lr", &C::train, &P::lr));
        f.push_back(double_field("train.lr_log_z", &C::train, &P::lr_log_z));
        f.push_back(double_field("train.clip_grad_norm", &C::train, &P::clip_grad_norm));
        f.push_back(size_field("train.checkpoint_every", &C::train, &P::checkpoint_every));
        f.push_back(bool_field("train.augment_with_pb", &C::train, &P::augment_with_pb));
        f.push_back(size_field("train.visit_window", &C::train, &P::visit_window));
        f.push_back(size_field("train.recent_window", &C::train, &P::recent_window));
        f.push_back(bool_field("train.wall_clock", &C::train, &P::wall_clock));

        f.push_back({"eval.indicators", [](C const& c) { return fmt_list(c.eval.indicators); },
                     [](C& c, std::string const& v) { c.eval.indicators = parse_list(v); }});
        f.push_back(size_field("eval.front_resolution", &C::eval, &EvalConfig::front_resolution));
        f.push_back(size_field("eval.r2_divisions", &C::eval, &EvalConfig::r2_divisions));
        f.push_back({"eval.hv_reference", [](C const& c) { return fmt_doubles(c.eval.hv_reference); },
                     [](C& c, std::string const& v) { c.eval.hv_reference = parse_doubles(v); }});
        f.push_back(size_field("eval.candidates", &C::eval, &EvalConfig::candidates));
        f.push_back(size_field("eval.rounds", &C::eval, &EvalConfig::rounds));
        f.push_back(double_field("eval.boost_ratio", &C::eval, &EvalConfig::boost_ratio));
        return f;
    }();
    return table;
}

std::set<std::string> const& indicator_names() {
    static std::set<std::string> const names{"gd", "igd", "gd_plus", "igd_plus", "d_h", "hv", "pc_ent", "r2"};
    return names;
}

} // namespace

RunConfig parse_run_config(std::string_view text) {
    RunConfig c;
    std::set<std::string> seen;
    auto const lines = util::split(text, '\n');
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto const line = util::trim(lines[i]);
        if (line.empty() || line.front() == '#') { continue; }
        auto const eq = line.find('=');
        std::string const where = "line " + std::to_string(i + 1);
        if (eq == std::string_view::npos) { throw ConfigError(where + ": expected 'section.key = value'"); }
        std::string const key(util::trim(line.substr(0, eq)));
        std::string const value(util::trim(line.substr(eq + 1)));
        auto const& table = fields();
        auto it = std::find_if(table.begin(), table.end(), [&](Field const& f) { return f.key == key; });
        if (it == table.end()) { throw ConfigError("unknown config key '" + key + "' (" + where + ")"); }
        if (!seen.insert(key).second) { throw ConfigError("duplicate config key '" + key + "' (" + where + ")"); }
        try {
            it->set(c, value);
        } catch (ConfigError const& e) {
            std::string const msg = e.what();
            if (msg.rfind(key, 0) == 0) { throw; }
            throw ConfigError(key + ": " + msg);
        } catch (std::exception const& e) { throw ConfigError(key + ": " + e.what()); }
    }
    resolve(c);
    return c;
}

RunConfig load_run_config(std::string const& path) {
    std::ifstream in(path);
    if (!in) { throw ConfigError("cannot read config file " + path); }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string echo(RunConfig const& c) {
    std::string out;
    for (auto const& f : fields()) { out += f.key + " = " + f.get(c) + '\n'; }
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (auto const& f : fields()) { out.push_back(f.key); }
    return out;
}

bool operator==(RunConfig const& a, RunConfig const& b) {
    return std::all_of(fields().begin(), fields().end(), [&](Field const& f) { return f.get(a) == f.get(b); });
}

std::string config_hash(RunConfig const& c) { return util::hex64(util::fnv1a(echo(c))); }

std::string output_header(RunConfig const& c) {
    return "# seed=" + std::to_string(c.seed) + " config_hash=" + config_hash(c);
}

void resolve(RunConfig& c) {
    c.train.seed = c.seed;
    c.model.seed = c.seed;
}

gfn::ModelSpec model_spec(RunConfig const& c, env::Environment const& env) {
    auto m = c.model;
    m.preference_dim = c.loss.preference == gfn::Preference::dirichlet ? env.objective_dim() : 0;
    return m;
}

std::unique_ptr<env::Environment> validate(RunConfig const& c) {
    auto env = env::make_environment(c.env);
    train::validate(c.train, *env, c.loss, model_spec(c, *env));
    for (auto const& name : c.eval.indicators) {
        if (indicator_names().count(name) == 0) { throw ConfigError("eval.indicators: unknown indicator '" + name + "'"); }
    }
    if (c.eval.front_resolution < 2) { throw ConfigError("eval.front_resolution must be >= 2"); }
    if (c.eval.r2_divisions < 1) { throw ConfigError("eval.r2_divisions must be >= 1"); }
    if (!c.eval.hv_reference.empty() && c.eval.hv_reference.size() != env->objective_dim()) {
        throw ConfigError("eval.hv_reference must have one entry per objective");
    }
    if (c.eval.candidates < 1) { throw ConfigError("eval.candidates must be >= 1"); }
    if (c.eval.rounds < 1) { throw ConfigError("eval.rounds must be >= 1"); }
    if (!(c.eval.boost_ratio >= 1.0) || !std::isfinite(c.eval.boost_ratio)) {
        throw ConfigError("eval.boost_ratio must be >= 1");
    }
    if (c.output.empty()) { throw ConfigError("run.output must not be empty"); }
    return env;
}

std::string env_hash(env::Environment const& env) { return util::hex64(util::fnv1a(env.describe())); }

} // namespace opgfn::cli
