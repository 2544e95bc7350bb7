#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace opgfn::ad {

// Text checkpoint: a `key = value` metadata header, then named float blocks
// ("params", optionally "adam_m", "adam_v") with one value per line.
//
//   # opgfn checkpoint 1
//   env_hash = 5f1c...
//   params 3
//   0.5
//   ...
//   end
struct Checkpoint {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<std::pair<std::string, std::vector<double>>> blocks;

    void set(std::string key, std::string value);
    [[nodiscard]] std::optional<std::string> get(std::string_view key) const;
    // Throws ConfigError naming the key when absent.
    [[nodiscard]] std::string const& require(std::string_view key) const;

    void set_block(std::string name, std::vector<double> values);
    [[nodiscard]] std::vector<double> const* block(std::string_view name) const;
};

[[nodiscard]] std::string to_text(Checkpoint const& c);
// Throws ConfigError with the offending line number on malformed input.
[[nodiscard]] Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(Checkpoint const& c, std::filesystem::path const& path);
[[nodiscard]] Checkpoint load_checkpoint(std::filesystem::path const& path);

} // namespace opgfn::ad
