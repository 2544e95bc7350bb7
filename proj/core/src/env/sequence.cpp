#include "opgfn/env/sequence.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "opgfn/env/objectives.hpp"
#include "opgfn/errors.hpp"
#include "opgfn/util/format.hpp"

namespace opgfn::env {

namespace {

std::optional<std::uint64_t> checked_add(std::optional<std::uint64_t> a, std::optional<std::uint64_t> b) {
    if (!a || !b || *a > std::numeric_limits<std::uint64_t>::max() - *b) { return std::nullopt; }
    return *a + *b;
}

} // namespace

SequenceEnv::SequenceEnv(int alphabet_size, int max_length, std::vector<std::string> objectives,
                         std::uint64_t seed, bool early_stop, std::uint64_t enumeration_cap)
    : alphabet_(alphabet_size), length_(max_length), objectives_(std::move(objectives)), seed_(seed),
      early_stop_(early_stop), cap_(enumeration_cap) {
    if (alphabet_ < 1) { throw ConfigError("env.alphabet_size must be a positive integer"); }
    if (length_ < 1) { throw ConfigError("env.max_length must be a positive integer"); }
    if (objectives_.empty()) { throw ConfigError("env.objectives must name at least one sequence objective"); }
    for (auto const& name : objectives_) {
        if (name == "bag") {
            if (static_cast<std::size_t>(length_) != objectives::bag_size || alphabet_ != objectives::bag_alphabet) {
                throw ConfigError("objective 'bag' requires env.alphabet_size = 7 and env.max_length = 13");
            }
            grams_.emplace_back();
        } else if (name.rfind("ngram:", 0) == 0) {
            grams_.push_back(parse_gram(name.substr(6), alphabet_));
        } else {
            throw ConfigError("unknown sequence objective '" + name + "'");
        }
    }
}

std::vector<int> SequenceEnv::parse_gram(std::string const& text, int alphabet) {
    if (text.empty()) { throw ConfigError("n-gram objective has an empty gram"); }
    std::vector<int> gram;
    for (char c : text) {
        char const* pos = std::strchr(objectives::amino_vocabulary, c);
        if (c == '\0' || pos == nullptr) { throw ConfigError(std::string("n-gram symbol '") + c + "' not in the vocabulary"); }
        auto const k = static_cast<int>(pos - objectives::amino_vocabulary);
        if (k >= alphabet) { throw ConfigError(std::string("n-gram symbol '") + c + "' outside the alphabet"); }
        gram.push_back(k);
    }
    return gram;
}

std::string SequenceEnv::describe() const {
    std::string out = "seq-prepend-append alphabet=" + std::to_string(alphabet_) +
                      " length=" + std::to_string(length_);
    out += " objectives=" + util::join(objectives_, ",");
    out += " seed=" + std::to_string(seed_);
    if (early_stop_) { out += " early_stop"; }
    return out;
}

ActionId SequenceEnv::prepend(int symbol) const { return ActionId{static_cast<std::uint32_t>(symbol)}; }
ActionId SequenceEnv::append(int symbol) const { return ActionId{static_cast<std::uint32_t>(alphabet_ + symbol)}; }
ActionId SequenceEnv::terminate() const { return ActionId{static_cast<std::uint32_t>(2 * alphabet_)}; }

State SequenceEnv::initial_state() const { return State{}; }

std::size_t SequenceEnv::num_forward_actions() const { return 2 * static_cast<std::size_t>(alphabet_) + 1; }

void SequenceEnv::check_state(State const& s) const {
    if (s.cells.size() > static_cast<std::size_t>(length_)) { throw ContractViolation("sequence longer than max length"); }
    for (int c : s.cells) {
        if (c < 0 || c >= alphabet_) { throw ContractViolation("sequence symbol outside the alphabet"); }
    }
    if (s.terminal && s.cells.empty()) { throw ContractViolation("empty sequence cannot be terminal"); }
}

std::vector<ActionId> SequenceEnv::forward_actions(State const& s) const {
    check_state(s);
    if (s.terminal) { throw ContractViolation("forward_actions called on a terminal state"); }
    std::vector<ActionId> out;
    auto const len = s.cells.size();
    if (len == static_cast<std::size_t>(length_)) { return {terminate()}; }
    if (len > 0) {
        for (int k = 0; k < alphabet_; ++k) { out.push_back(prepend(k)); }
    }
    for (int k = 0; k < alphabet_; ++k) { out.push_back(append(k)); }
    if (early_stop_ && len > 0) { out.push_back(terminate()); }
    return out;
}

std::vector<ActionId> SequenceEnv::backward_actions(State const& s) const {
    check_state(s);
    if (s.terminal) { return {ActionId{undo_terminal}}; }
    if (s.cells.empty()) { throw ContractViolation("backward_actions called on the initial state"); }
    if (s.cells.size() == 1) { return {ActionId{drop_last}}; }
    return {ActionId{drop_first}, ActionId{drop_last}};
}

State SequenceEnv::step(State const& s, ActionId forward) const {
    auto const legal = forward_actions(s);
    if (std::find(legal.begin(), legal.end(), forward) == legal.end()) {
        throw ContractViolation("illegal forward action " + std::to_string(forward.index));
    }
    auto const a = static_cast<int>(forward.index);
    State next = s;
    if (a == 2 * alphabet_) {
        next.terminal = true;
    } else if (a < alphabet_) {
        next.cells.insert(next.cells.begin(), a);
    } else {
        next.cells.push_back(a - alphabet_);
    }
    return next;
}

State SequenceEnv::unstep(State const& s, ActionId backward) const {
    auto const legal = backward_actions(s);
    if (std::find(legal.begin(), legal.end(), backward) == legal.end()) {
        throw ContractViolation("illegal backward action " + std::to_string(backward.index));
    }
    State prev = s;
    switch (backward.index) {
    case undo_terminal: prev.terminal = false; break;
    case drop_first: prev.cells.erase(prev.cells.begin()); break;
    default: prev.cells.pop_back(); break;
    }
    return prev;
}

ActionId SequenceEnv::backward_inverse(State const& parent, ActionId forward) const {
    auto const a = static_cast<int>(forward.index);
    if (a == 2 * alphabet_) { return ActionId{undo_terminal}; }
    // Prepending to the empty sequence is never legal, so a prepend always
    // leaves a child of length >= 2 where "drop first" exists.
    if (a < alphabet_) {
        if (parent.cells.empty()) { throw ContractViolation("prepend is illegal from the empty sequence"); }
        return ActionId{drop_first};
    }
    return ActionId{drop_last};
}

ActionId SequenceEnv::forward_inverse(State const& child, ActionId backward) const {
    switch (backward.index) {
    case undo_terminal: return terminate();
    case drop_first: return prepend(child.cells.front());
    case drop_last: return append(child.cells.back());
    default: throw ContractViolation("unknown backward action");
    }
}

ObjectiveVector SequenceEnv::objective(State const& terminal) const {
    check_state(terminal);
    if (!terminal.terminal) { throw ContractViolation("objective evaluated on a non-terminal state"); }
    ObjectiveVector u;
    u.reserve(objectives_.size());
    for (std::size_t i = 0; i < objectives_.size(); ++i) {
        if (objectives_[i] == "bag") {
            u.push_back(objectives::bag(terminal.cells, seed_));
        } else {
            u.push_back(objectives::ngram(terminal.cells, grams_[i], static_cast<std::size_t>(length_)));
        }
    }
    return u;
}

std::size_t SequenceEnv::max_trajectory_length() const { return static_cast<std::size_t>(length_) + 1; }

std::optional<std::uint64_t> SequenceEnv::power(int j) const {
    std::uint64_t p = 1;
    auto const k = static_cast<std::uint64_t>(alphabet_);
    for (int i = 0; i < j; ++i) {
        if (p > std::numeric_limits<std::uint64_t>::max() / k) { return std::nullopt; }
        p *= k;
    }
    return p;
}

std::optional<std::uint64_t> SequenceEnv::nonterminal_offset(std::size_t length) const {
    std::optional<std::uint64_t> total = 0;
    for (std::size_t j = 0; j < length; ++j) { total = checked_add(total, power(static_cast<int>(j))); }
    return total;
}

std::optional<std::uint64_t> SequenceEnv::terminal_count() const {
    if (!early_stop_) { return power(length_); }
    // Every non-empty length up to l; the empty prefix contributes K^0 = 1.
    auto const all = nonterminal_offset(static_cast<std::size_t>(length_) + 1);
    if (!all) { return std::nullopt; }
    return *all - 1;
}

std::uint64_t SequenceEnv::base_k(State const& s) const {
    std::uint64_t v = 0;
    for (int c : s.cells) { v = v * static_cast<std::uint64_t>(alphabet_) + static_cast<std::uint64_t>(c); }
    return v;
}

std::size_t SequenceEnv::terminal_index(State const& terminal) const {
    check_state(terminal);
    if (!terminal.terminal) { throw ContractViolation("terminal_index of a non-terminal state"); }
    if (!terminal_count()) { throw CapabilityError("terminal space too large to index"); }
    if (!early_stop_) {
        if (terminal.cells.size() != static_cast<std::size_t>(length_)) {
            throw ContractViolation("terminal sequence shorter than max length");
        }
        return static_cast<std::size_t>(base_k(terminal));
    }
    return static_cast<std::size_t>(*nonterminal_offset(terminal.cells.size()) - 1 + base_k(terminal));
}

State SequenceEnv::terminal_at(std::size_t index) const {
    auto const n = terminal_count();
    if (!n || index >= *n) { throw ContractViolation("terminal index out of range"); }
    std::size_t len = static_cast<std::size_t>(length_);
    std::uint64_t rest = index;
    if (early_stop_) {
        len = 1;
        while (rest >= *power(static_cast<int>(len))) {
            rest -= *power(static_cast<int>(len));
            ++len;
        }
    }
    State s{std::vector<int>(len, 0), true};
    for (std::size_t p = len; p-- > 0;) {
        s.cells[p] = static_cast<int>(rest % static_cast<std::uint64_t>(alphabet_));
        rest /= static_cast<std::uint64_t>(alphabet_);
    }
    return s;
}

std::optional<std::uint64_t> SequenceEnv::state_count() const {
    return checked_add(nonterminal_offset(static_cast<std::size_t>(length_) + 1), terminal_count());
}

std::size_t SequenceEnv::state_index(State const& s) const {
    check_state(s);
    auto const nonterminal = nonterminal_offset(static_cast<std::size_t>(length_) + 1);
    if (!state_count()) { throw CapabilityError("state space too large to index"); }
    if (s.terminal) { return static_cast<std::size_t>(*nonterminal + terminal_index(s)); }
    return static_cast<std::size_t>(*nonterminal_offset(s.cells.size()) + base_k(s));
}

std::size_t SequenceEnv::feature_width() const {
    return static_cast<std::size_t>(length_) * static_cast<std::size_t>(alphabet_ + 1) + 1;
}

void SequenceEnv::featurize(State const& s, std::span<double> out) const {
    check_state(s);
    if (out.size() != feature_width()) { throw ContractViolation("feature buffer has wrong width"); }
    std::fill(out.begin(), out.end(), 0.0);
    auto const stride = static_cast<std::size_t>(alphabet_ + 1);
    for (std::size_t p = 0; p < static_cast<std::size_t>(length_); ++p) {
        auto const channel = p < s.cells.size() ? static_cast<std::size_t>(s.cells[p]) : static_cast<std::size_t>(alphabet_);
        out[p * stride + channel] = 1.0;
    }
    out.back() = s.terminal ? 1.0 : 0.0;
}

} // namespace opgfn::env
