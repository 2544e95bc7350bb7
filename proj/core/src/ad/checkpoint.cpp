#include "opgfn/ad/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "opgfn/errors.hpp"
#include "opgfn/util/format.hpp"

namespace opgfn::ad {

namespace {

constexpr std::string_view magic = "# opgfn checkpoint 1";

bool valid_token(std::string_view s) {
    return !s.empty() && s.find_first_of(" \t\n=") == std::string_view::npos;
}

} // namespace

void Checkpoint::set(std::string key, std::string value) {
    if (!valid_token(key) || value.find('\n') != std::string::npos) {
        throw ContractViolation("checkpoint header entry '" + key + "' is not representable");
    }
    for (auto& [k, v] : header) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    header.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> Checkpoint::get(std::string_view key) const {
    for (auto const& [k, v] : header) {
        if (k == key) { return v; }
    }
    return std::nullopt;
}

std::string const& Checkpoint::require(std::string_view key) const {
    for (auto const& [k, v] : header) {
        if (k == key) { return v; }
    }
    throw ConfigError("checkpoint: missing header key '" + std::string(key) + "'");
}

void Checkpoint::set_block(std::string name, std::vector<double> values) {
    if (!valid_token(name)) { throw ContractViolation("checkpoint block name '" + name + "' is not representable"); }
    for (auto& [n, v] : blocks) {
        if (n == name) {
            v = std::move(values);
            return;
        }
    }
    blocks.emplace_back(std::move(name), std::move(values));
}

std::vector<double> const* Checkpoint::block(std::string_view name) const {
    for (auto const& [n, v] : blocks) {
        if (n == name) { return &v; }
    }
    return nullptr;
}

std::string to_text(Checkpoint const& c) {
    std::string out(magic);
    out += '\n';
    for (auto const& [k, v] : c.header) { out += k + " = " + v + '\n'; }
    for (auto const& [name, values] : c.blocks) {
        out += name + ' ' + std::to_string(values.size()) + '\n';
        for (double x : values) { out += util::format_double(x) + '\n'; }
    }
    out += "end\n";
    return out;
}

Checkpoint parse_checkpoint(std::string_view text) {
    Checkpoint c;
    auto const lines = util::split(text, '\n');
    std::size_t i = 0;
    auto fail = [&](std::string const& what) -> ConfigError {
        return ConfigError("checkpoint: line " + std::to_string(i + 1) + ": " + what);
    };
    if (lines.empty() || util::trim(lines[0]) != magic) { throw fail("missing '" + std::string(magic) + "'"); }
    bool ended = false;
    for (i = 1; i < lines.size(); ++i) {
        auto const line = util::trim(lines[i]);
        if (line.empty()) { continue; }
        if (line == "end") {
            ended = true;
            break;
        }
        if (auto eq = line.find('='); eq != std::string_view::npos) {
            c.set(std::string(util::trim(line.substr(0, eq))), std::string(util::trim(line.substr(eq + 1))));
            continue;
        }
        auto const sp = line.find(' ');
        if (sp == std::string_view::npos) { throw fail("expected 'key = value' or '<block> <count>'"); }
        std::string const name(line.substr(0, sp));
        std::size_t count = 0;
        try {
            count = static_cast<std::size_t>(std::stoull(std::string(line.substr(sp + 1))));
        } catch (std::exception const&) { throw fail("bad block count"); }
        if (i + count >= lines.size()) { throw fail("block '" + name + "' is truncated"); }
        std::vector<double> values(count);
        for (std::size_t j = 0; j < count; ++j) {
            ++i;
            try {
                values[j] = util::parse_double(util::trim(lines[i]));
            } catch (std::exception const&) { throw fail("bad value in block '" + name + "'"); }
        }
        c.set_block(name, std::move(values));
    }
    if (!ended) { throw fail("missing 'end'"); }
    return c;
}

void save_checkpoint(Checkpoint const& c, std::filesystem::path const& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) { throw ConfigError("checkpoint: cannot write " + path.string()); }
    out << to_text(c);
    if (!out) { throw ConfigError("checkpoint: write failed for " + path.string()); }
}

Checkpoint load_checkpoint(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw ConfigError("checkpoint: cannot read " + path.string()); }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_checkpoint(buf.str());
}

} // namespace opgfn::ad
