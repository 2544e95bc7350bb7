#include "opgfn/env/hypergrid.hpp"

#include <algorithm>

#include "opgfn/env/objectives.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/util/format.hpp"

namespace opgfn::env {

HyperGrid::HyperGrid(int dim, int side, double r0, std::vector<std::string> objectives, EnvKind kind)
    : dim_(dim), side_(side), r0_(r0), objectives_(std::move(objectives)), kind_(kind) {
    if (dim_ < 1) { throw ConfigError("env.dim must be a positive integer"); }
    if (side_ < 1) { throw ConfigError("env.side must be a positive integer"); }
    if (r0_ < 0.0) { throw ConfigError("env.r0 must be nonnegative"); }
    if (kind_ == EnvKind::sequence) { throw ConfigError("HyperGrid cannot have sequence kind"); }
    if (objectives_.empty()) {
        objectives_.push_back(kind_ == EnvKind::cosine_grid ? "cosine" : "hypergrid");
    }
    for (auto const& name : objectives_) {
        if (!objectives::is_grid_objective(name)) {
            throw ConfigError("unknown grid objective '" + name + "'");
        }
        if (name != "hypergrid" && name != "cosine" && dim_ != 2) {
            throw ConfigError("objective '" + name + "' requires env.dim = 2");
        }
    }
    std::uint64_t cells = 1;
    for (int d = 0; d < dim_; ++d) {
        if (cells > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(side_)) {
            throw ConfigError("grid too large");
        }
        cells *= static_cast<std::uint64_t>(side_);
    }
    cells_ = cells;
}

std::string HyperGrid::describe() const {
    std::string out = kind_ == EnvKind::cosine_grid ? "cosine-grid" : "hypergrid";
    out += " dim=" + std::to_string(dim_) + " side=" + std::to_string(side_);
    out += " r0=" + util::format_double(r0_);
    out += " objectives=" + util::join(objectives_, ",");
    return out;
}

State HyperGrid::initial_state() const { return State{std::vector<int>(static_cast<std::size_t>(dim_), 0), false}; }

std::size_t HyperGrid::num_forward_actions() const { return static_cast<std::size_t>(dim_) + 1; }
std::size_t HyperGrid::num_backward_actions() const { return static_cast<std::size_t>(dim_) + 1; }

void HyperGrid::check_state(State const& s) const {
    if (s.cells.size() != static_cast<std::size_t>(dim_)) {
        throw ContractViolation("grid state has wrong dimension");
    }
    for (int c : s.cells) {
        if (c < 0 || c >= side_) { throw ContractViolation("grid coordinate out of bounds"); }
    }
}

std::vector<ActionId> HyperGrid::forward_actions(State const& s) const {
    check_state(s);
    if (s.terminal) { throw ContractViolation("forward_actions called on a terminal state"); }
    std::vector<ActionId> out;
    for (int d = 0; d < dim_; ++d) {
        if (s.cells[static_cast<std::size_t>(d)] + 1 < side_) {
            out.push_back(ActionId{static_cast<std::uint32_t>(d)});
        }
    }
    out.push_back(ActionId{static_cast<std::uint32_t>(dim_)});
    return out;
}

std::vector<ActionId> HyperGrid::backward_actions(State const& s) const {
    check_state(s);
    if (s.terminal) { return {ActionId{static_cast<std::uint32_t>(dim_)}}; }
    std::vector<ActionId> out;
    for (int d = 0; d < dim_; ++d) {
        if (s.cells[static_cast<std::size_t>(d)] > 0) { out.push_back(ActionId{static_cast<std::uint32_t>(d)}); }
    }
    if (out.empty()) { throw ContractViolation("backward_actions called on the initial state"); }
    return out;
}

State HyperGrid::step(State const& s, ActionId forward) const {
    check_state(s);
    if (s.terminal) { throw ContractViolation("step from a terminal state"); }
    auto const a = static_cast<int>(forward.index);
    if (a == dim_) { return State{s.cells, true}; }
    if (a > dim_ || s.cells[static_cast<std::size_t>(a)] + 1 >= side_) {
        throw ContractViolation("illegal forward action " + std::to_string(a));
    }
    State next = s;
    ++next.cells[static_cast<std::size_t>(a)];
    return next;
}

State HyperGrid::unstep(State const& s, ActionId backward) const {
    check_state(s);
    auto const a = static_cast<int>(backward.index);
    if (s.terminal) {
        if (a != dim_) { throw ContractViolation("illegal backward action at terminal state"); }
        return State{s.cells, false};
    }
    if (a >= dim_ || s.cells[static_cast<std::size_t>(a)] == 0) {
        throw ContractViolation("illegal backward action " + std::to_string(a));
    }
    State prev = s;
    --prev.cells[static_cast<std::size_t>(a)];
    return prev;
}

ActionId HyperGrid::backward_inverse(State const& /*parent*/, ActionId forward) const { return forward; }
ActionId HyperGrid::forward_inverse(State const& /*child*/, ActionId backward) const { return backward; }

std::vector<double> HyperGrid::unit_coordinates(State const& s) const {
    std::vector<double> x(s.cells.size());
    double const scale = side_ > 1 ? 1.0 / static_cast<double>(side_ - 1) : 0.0;
    std::transform(s.cells.begin(), s.cells.end(), x.begin(),
                   [scale](int c) { return static_cast<double>(c) * scale; });
    return x;
}

ObjectiveVector HyperGrid::objective(State const& terminal) const {
    check_state(terminal);
    if (!terminal.terminal) { throw ContractViolation("objective evaluated on a non-terminal state"); }
    auto const x = unit_coordinates(terminal);
    ObjectiveVector u;
    u.reserve(objectives_.size());
    for (auto const& name : objectives_) { u.push_back(objectives::grid_objective(name, x, r0_)); }
    return u;
}

std::size_t HyperGrid::max_trajectory_length() const {
    return static_cast<std::size_t>(dim_) * static_cast<std::size_t>(side_ - 1) + 1;
}

std::optional<std::uint64_t> HyperGrid::terminal_count() const { return cells_; }

std::size_t HyperGrid::linear_index(State const& s) const {
    std::size_t idx = 0;
    for (int c : s.cells) { idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(c); }
    return idx;
}

std::size_t HyperGrid::terminal_index(State const& terminal) const {
    check_state(terminal);
    if (!terminal.terminal) { throw ContractViolation("terminal_index of a non-terminal state"); }
    return linear_index(terminal);
}

State HyperGrid::terminal_at(std::size_t index) const {
    if (index >= cells_) { throw ContractViolation("terminal index out of range"); }
    State s{std::vector<int>(static_cast<std::size_t>(dim_), 0), true};
    for (int d = dim_ - 1; d >= 0; --d) {
        s.cells[static_cast<std::size_t>(d)] = static_cast<int>(index % static_cast<std::size_t>(side_));
        index /= static_cast<std::size_t>(side_);
    }
    return s;
}

std::optional<std::uint64_t> HyperGrid::state_count() const { return 2 * cells_; }

std::size_t HyperGrid::state_index(State const& s) const {
    check_state(s);
    return linear_index(s) + (s.terminal ? cells_ : 0);
}

std::size_t HyperGrid::feature_width() const {
    return static_cast<std::size_t>(dim_) * static_cast<std::size_t>(side_) + 1;
}

void HyperGrid::featurize(State const& s, std::span<double> out) const {
    check_state(s);
    if (out.size() != feature_width()) { throw ContractViolation("feature buffer has wrong width"); }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t d = 0; d < s.cells.size(); ++d) {
        out[d * static_cast<std::size_t>(side_) + static_cast<std::size_t>(s.cells[d])] = 1.0;
    }
    out.back() = s.terminal ? 1.0 : 0.0;
}

} // namespace opgfn::env
