#include "opgfn/env/factory.hpp"

#include "opgfn/env/hypergrid.hpp"
#include "opgfn/env/sequence.hpp"
#include "opgfn/errors.hpp"

namespace opgfn::env {

std::string to_string(EnvKind kind) {
    switch (kind) {
    case EnvKind::hypergrid: return "hypergrid";
    case EnvKind::cosine_grid: return "cosine-grid";
    case EnvKind::sequence: return "seq-prepend-append";
    }
    return "?";
}

EnvKind parse_env_kind(std::string const& text) {
    if (text == "hypergrid") { return EnvKind::hypergrid; }
    if (text == "cosine-grid") { return EnvKind::cosine_grid; }
    if (text == "seq-prepend-append") { return EnvKind::sequence; }
    throw ConfigError("env.kind: unknown environment '" + text + "'");
}

std::unique_ptr<Environment> make_environment(EnvSpec const& spec) {
    if (spec.kind == EnvKind::sequence) {
        return std::make_unique<SequenceEnv>(spec.alphabet_size, spec.max_length, spec.objectives, spec.seed,
                                             spec.early_stop, spec.enumeration_cap);
    }
    return std::make_unique<HyperGrid>(spec.dim, spec.side, spec.r0, spec.objectives, spec.kind);
}

} // namespace opgfn::env
