#include "opgfn/gfn/trajectory.hpp"

#include "opgfn/errors.hpp"

namespace opgfn::gfn {

void check_trajectory(env::Environment const& env, Trajectory const& t) {
    if (t.states.size() != t.actions.size() + 1) { throw ContractViolation("trajectory needs n + 1 states for n actions"); }
    if (t.states.empty() || !env.is_initial(t.states.front())) { throw ContractViolation("trajectory must start at s0"); }
    if (!t.states.back().terminal) { throw ContractViolation("trajectory must end in a terminal state"); }
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
        if (env.step(t.states[i], t.actions[i]) != t.states[i + 1]) {
            throw ContractViolation("trajectory step " + std::to_string(i) + " is not a legal transition");
        }
    }
}

} // namespace opgfn::gfn
