#include "opgfn/env/environment.hpp"

#include "opgfn/errors.hpp"

namespace opgfn::env {

bool Environment::enumerable() const {
    auto const n = terminal_count();
    return n.has_value() && *n <= enumeration_cap();
}

void Environment::for_each_terminal(std::function<void(State const&)> const& visit) const {
    if (!enumerable()) {
        throw CapabilityError("terminal space of '" + describe() +
                              "' exceeds the enumeration cap; use sampling-based evaluation");
    }
    auto const n = static_cast<std::size_t>(*terminal_count());
    for (std::size_t i = 0; i < n; ++i) { visit(terminal_at(i)); }
}

std::vector<State> Environment::enumerate_terminals() const {
    std::vector<State> out;
    if (enumerable()) { out.reserve(static_cast<std::size_t>(*terminal_count())); }
    for_each_terminal([&out](State const& s) { out.push_back(s); });
    return out;
}

} // namespace opgfn::env
