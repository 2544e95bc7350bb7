#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "opgfn/env/environment.hpp"

namespace opgfn::env {

// Everything needed to construct an environment.
struct EnvSpec {
    EnvKind kind = EnvKind::hypergrid;
    int dim = 2;
    int side = 8;
    double r0 = 0.1;
    std::vector<std::string> objectives;
    int alphabet_size = 4;
    int max_length = 6;
    bool early_stop = false;
    std::uint64_t seed = 0;
    std::uint64_t enumeration_cap = default_enumeration_cap;
};

[[nodiscard]] std::string to_string(EnvKind kind);
[[nodiscard]] EnvKind parse_env_kind(std::string const& text);

[[nodiscard]] std::unique_ptr<Environment> make_environment(EnvSpec const& spec);

} // namespace opgfn::env
